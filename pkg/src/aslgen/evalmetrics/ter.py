"""Translation edit rate with tercom-style greedy block shifts."""
from __future__ import annotations

from typing import Sequence

from ._common import Sentence, paired

MAX_SHIFT_SIZE = 10
MAX_SHIFT_DIST = 50
MAX_SHIFT_CANDIDATES = 1000

# trace ops: '=' match, 's' substitution, 'h' hypothesis-only word, 'r' reference-only word
_DIAG = "=s"


def edit_distance(h: Sequence[str], r: Sequence[str]) -> tuple[int, str]:
    """Levenshtein distance and its trace, preferring diagonal, then 'h', then 'r' steps."""
    nh, nr = len(h), len(r)
    inf = nh + nr + 1
    cost = [[inf] * (nr + 1) for _ in range(nh + 1)]
    op = [[""] * (nr + 1) for _ in range(nh + 1)]
    for j in range(nr + 1):
        cost[0][j], op[0][j] = j, "r"
    for i in range(1, nh + 1):
        cost[i][0], op[i][0] = i, "h"
        for j in range(1, nr + 1):
            same = h[i - 1] == r[j - 1]
            best, best_op = cost[i - 1][j - 1] + (0 if same else 1), ("=" if same else "s")
            if cost[i - 1][j] + 1 < best:
                best, best_op = cost[i - 1][j] + 1, "h"
            if cost[i][j - 1] + 1 < best:
                best, best_op = cost[i][j - 1] + 1, "r"
            cost[i][j], op[i][j] = best, best_op
    trace = []
    i, j = nh, nr
    while i > 0 or j > 0:
        o = op[i][j]
        trace.append(o)
        if o in _DIAG:
            i, j = i - 1, j - 1
        elif o == "h":
            i -= 1
        else:
            j -= 1
    return cost[nh][nr], "".join(reversed(trace))


def _alignment(trace: str):
    ph = pr = -1
    align: dict[int, int] = {}
    hyp_err: list[int] = []
    ref_err: list[int] = []
    for o in trace:
        if o in _DIAG:
            ph += 1
            pr += 1
            align[pr] = ph
            e = 0 if o == "=" else 1
            hyp_err.append(e)
            ref_err.append(e)
        elif o == "h":
            ph += 1
            hyp_err.append(1)
        else:
            pr += 1
            align[pr] = ph
            ref_err.append(1)
    return align, ref_err, hyp_err


def _shift_words(words: list[str], start: int, length: int, target: int) -> list[str]:
    block = words[start:start + length]
    if target < start:
        return words[:target] + block + words[target:start] + words[start + length:]
    if target > start + length:
        return words[:start] + words[start + length:target] + block + words[target:]
    return words[:start] + words[start + length:length + target] + block + words[length + target:]


def _matching_spans(h: Sequence[str], r: Sequence[str]):
    for sh in range(len(h)):
        for sr in range(len(r)):
            if abs(sr - sh) > MAX_SHIFT_DIST:
                continue
            length = 0
            while h[sh + length] == r[sr + length] and length < MAX_SHIFT_SIZE:
                length += 1
                yield sh, sr, length
                if sh + length == len(h) or sr + length == len(r):
                    break


def _best_shift(h: list[str], r: list[str], ed, checked: int):
    score, trace = ed(h)
    align, ref_err, hyp_err = _alignment(trace)
    best = None
    for sh, sr, length in _matching_spans(h, r):
        if not any(hyp_err[sh:sh + length]) or not any(ref_err[sr:sr + length]):
            continue
        if sh <= align[sr] < sh + length:
            continue
        prev = -1
        for off in range(-1, length):
            if sr + off == -1:
                idx = 0
            elif sr + off in align:
                idx = align[sr + off] + 1
            else:
                break
            if idx == prev:
                continue
            prev = idx
            moved = _shift_words(h, sh, length, idx)
            cand = (score - ed(moved)[0], length, -sh, -idx)
            checked += 1
            if best is None or cand > best[0]:
                best = (cand, moved)
        if checked >= MAX_SHIFT_CANDIDATES:
            break
    if best is None:
        return 0, h, checked
    return best[0][0], best[1], checked


def ter_edits(h: Sequence[str], r: Sequence[str]) -> int:
    """Shift count plus the edit distance after greedy shifting."""
    h, r = list(h), list(r)
    if not r:
        return len(h)
    memo: dict[tuple, tuple[int, str]] = {}

    def ed(words):
        key = tuple(words)
        if key not in memo:
            memo[key] = edit_distance(words, r)
        return memo[key]

    shifts = checked = 0
    while True:
        gain, moved, checked = _best_shift(h, r, ed, checked)
        if checked >= MAX_SHIFT_CANDIDATES or gain <= 0:
            break
        shifts += 1
        h = moved
    return shifts + ed(h)[0]


def ter(hyp: Sequence[Sentence], ref: Sequence[Sentence]) -> float:
    """Corpus TER: total edits over total reference length."""
    H, R = paired(hyp, ref)
    edits = sum(ter_edits(h, r) for h, r in zip(H, R))
    ref_len = sum(len(r) for r in R)
    if ref_len == 0:
        return 1.0 if edits else 0.0
    return edits / ref_len
