from __future__ import annotations

from typing import Sequence

from ._common import Sentence, paired


def lcs_length(a: Sequence[str], b: Sequence[str]) -> int:
    if not a or not b:
        return 0
    prev = [0] * (len(b) + 1)
    for x in a:
        cur = [0]
        for j, y in enumerate(b, 1):
            cur.append(prev[j - 1] + 1 if x == y else max(prev[j], cur[j - 1]))
        prev = cur
    return prev[-1]


def rouge_l_sentence(h: Sequence[str], r: Sequence[str]) -> float:
    lcs = lcs_length(h, r)
    if lcs == 0:
        return 0.0
    p, rec = lcs / len(h), lcs / len(r)
    return 2 * p * rec / (p + rec)


def rouge_l(hyp: Sequence[Sentence], ref: Sequence[Sentence]) -> float:
    """Mean sentence-level ROUGE-L F1 (LCS based)."""
    H, R = paired(hyp, ref)
    return sum(rouge_l_sentence(h, r) for h, r in zip(H, R)) / len(H)
