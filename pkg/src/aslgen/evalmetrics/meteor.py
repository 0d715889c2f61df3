"""METEOR with exact and Porter-stem matching stages (no synonym stage)."""
from __future__ import annotations

from collections import defaultdict
from functools import lru_cache
from typing import Sequence

from ._common import Sentence, paired

ALPHA = 0.9
BETA = 3.0
GAMMA = 0.5

@lru_cache(maxsize=1)
def _stemmer():
    # nltk takes seconds to import; only scoring runs should pay for it
    from nltk.stem.porter import PorterStemmer
    return PorterStemmer()


@lru_cache(maxsize=65536)
def _stem(word: str) -> str:
    return _stemmer().stem(word)


def _match(hyp: list[tuple[int, str]], ref: list[tuple[int, str]]):
    """Scan hypothesis words right to left, each taking the last free equal reference word."""
    positions: dict[str, list[int]] = defaultdict(list)
    for j, (_, w) in enumerate(ref):
        positions[w].append(j)
    pairs = []
    used_h, used_r = set(), set()
    for i in range(len(hyp) - 1, -1, -1):
        pos = positions.get(hyp[i][1])
        if pos:
            j = pos.pop()
            used_h.add(i)
            used_r.add(j)
            pairs.append((hyp[i][0], ref[j][0]))
    rest_h = [p for i, p in enumerate(hyp) if i not in used_h]
    rest_r = [p for j, p in enumerate(ref) if j not in used_r]
    return pairs, rest_h, rest_r


def align(h: Sequence[str], r: Sequence[str]) -> list[tuple[int, int]]:
    exact, rest_h, rest_r = _match(list(enumerate(h)), list(enumerate(r)))
    stemmed, _, _ = _match([(i, _stem(w)) for i, w in rest_h],
                           [(j, _stem(w)) for j, w in rest_r])
    return sorted(exact + stemmed)


def count_chunks(pairs: Sequence[tuple[int, int]]) -> int:
    chunks = 1
    for (h0, r0), (h1, r1) in zip(pairs, pairs[1:]):
        if not (h1 == h0 + 1 and r1 == r0 + 1):
            chunks += 1
    return chunks


def meteor_sentence(h: Sequence[str], r: Sequence[str]) -> float:
    pairs = align(h, r)
    m = len(pairs)
    if m == 0:
        return 0.0
    p, rec = m / len(h), m / len(r)
    fmean = p * rec / (ALPHA * p + (1 - ALPHA) * rec)
    penalty = GAMMA * (count_chunks(pairs) / m) ** BETA
    return (1 - penalty) * fmean


def meteor(hyp: Sequence[Sentence], ref: Sequence[Sentence]) -> float:
    """Mean sentence METEOR."""
    H, R = paired(hyp, ref)
    return sum(meteor_sentence(h, r) for h, r in zip(H, R)) / len(H)
