"""Corpus BLEU without smoothing."""
from __future__ import annotations

import math
from collections import Counter
from typing import Sequence

from ._common import Sentence, paired


def ngram_counts(toks: Sequence[str], n: int) -> Counter:
    return Counter(tuple(toks[i:i + n]) for i in range(len(toks) - n + 1))


def bleu_stats(hyp: Sequence[Sentence], ref: Sequence[Sentence], max_n: int = 4):
    """Return (matches[n], totals[n], hyp_len, ref_len) summed over the corpus."""
    H, R = paired(hyp, ref)
    matches = [0] * max_n
    totals = [0] * max_n
    hyp_len = ref_len = 0
    for h, r in zip(H, R):
        hyp_len += len(h)
        ref_len += len(r)
        for n in range(1, max_n + 1):
            hc = ngram_counts(h, n)
            rc = ngram_counts(r, n)
            totals[n - 1] += sum(hc.values())
            matches[n - 1] += sum(min(c, rc[g]) for g, c in hc.items())
    return matches, totals, hyp_len, ref_len


def brevity_penalty(hyp_len: int, ref_len: int) -> float:
    if hyp_len == 0:
        return 0.0
    if hyp_len >= ref_len:
        return 1.0
    return math.exp(1.0 - ref_len / hyp_len)


def bleu(hyp: Sequence[Sentence], ref: Sequence[Sentence], max_n: int = 4) -> float:
    """Geometric mean of clipped 1..max_n-gram precisions times the brevity penalty."""
    if not 1 <= max_n <= 4:
        raise ValueError("max_n must be in 1..4")
    matches, totals, hyp_len, ref_len = bleu_stats(hyp, ref, max_n)
    if any(m == 0 for m in matches) or any(t == 0 for t in totals):
        return 0.0
    log_p = sum(math.log(m / t) for m, t in zip(matches, totals)) / max_n
    return brevity_penalty(hyp_len, ref_len) * math.exp(log_p)
