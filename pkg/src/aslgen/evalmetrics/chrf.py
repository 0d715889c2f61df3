from __future__ import annotations

from collections import Counter
from typing import Sequence

from ._common import LengthMismatch


def _char_ngrams(s: str, n: int) -> Counter:
    return Counter(s[i:i + n] for i in range(len(s) - n + 1))


def chrf_stats(hyp: Sequence[str], ref: Sequence[str], char_n: int = 6) -> list[list[int]]:
    """Per-order [hyp, ref, match] character n-gram counts summed over the corpus."""
    if len(hyp) != len(ref):
        raise LengthMismatch(f"{len(hyp)} hypotheses vs {len(ref)} references")
    stats = [[0, 0, 0] for _ in range(char_n)]
    for h, r in zip(hyp, ref):
        h = "".join(h.split()) if isinstance(h, str) else "".join(h)
        r = "".join(r.split()) if isinstance(r, str) else "".join(r)
        for n in range(1, char_n + 1):
            hc, rc = _char_ngrams(h, n), _char_ngrams(r, n)
            st = stats[n - 1]
            # hypothesis n-grams only count where the reference has n-grams of that order
            st[0] += sum(hc.values()) if rc else 0
            st[1] += sum(rc.values())
            st[2] += sum(min(c, rc[g]) for g, c in hc.items() if g in rc)
    return stats


def chrf(hyp: Sequence[str], ref: Sequence[str], char_n: int = 6, beta: float = 2.0) -> float:
    """Character n-gram F-beta from precision and recall averaged over effective orders."""
    if not hyp:
        raise LengthMismatch("empty corpus")
    stats = chrf_stats(hyp, ref, char_n)
    prec_sum = rec_sum = 0.0
    order = 0
    for n_hyp, n_ref, n_match in stats:
        if n_hyp > 0 and n_ref > 0:
            prec_sum += n_match / n_hyp
            rec_sum += n_match / n_ref
            order += 1
    if order == 0:
        return 0.0
    p, r = prec_sum / order, rec_sum / order
    if p + r == 0:
        return 0.0
    b2 = beta * beta
    return (1 + b2) * p * r / (b2 * p + r)
