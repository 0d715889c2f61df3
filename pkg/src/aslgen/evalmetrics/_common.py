from __future__ import annotations

from typing import Sequence, Union

Sentence = Union[str, Sequence[str]]


class LengthMismatch(ValueError):
    pass


def tokens(s: Sentence) -> list[str]:
    """Whitespace tokens; glosses are case-significant so nothing is lowercased."""
    if isinstance(s, str):
        return s.split()
    return list(s)


def paired(hyp: Sequence[Sentence], ref: Sequence[Sentence], allow_empty: bool = False):
    if len(hyp) != len(ref):
        raise LengthMismatch(f"{len(hyp)} hypotheses vs {len(ref)} references")
    if not hyp and not allow_empty:
        raise LengthMismatch("empty corpus")
    return [tokens(h) for h in hyp], [tokens(r) for r in ref]
