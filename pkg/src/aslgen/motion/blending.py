"""Crossfade selected clips into one sequence with neutral bookends."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..posedict.dictionary import SignDictionary
from ..posedict.schema import PoseClip
from .matching import SynthesisPlan
from .sequence import PoseSequence


@dataclass(frozen=True)
class Segment:
    points: dict[str, np.ndarray]
    tag: str

    def __len__(self) -> int:
        return next(iter(self.points.values())).shape[0]


def resample(clip: PoseClip, fps: float) -> dict[str, np.ndarray]:
    """Linear resampling to ``fps`` keeping both endpoints exact."""
    n = len(clip)
    m = max(1, math.floor(n * fps / clip.fps + 0.5))
    if m == n:
        return {g: np.array(a, dtype=np.float64) for g, a in clip.points.items()}
    if n == 1:
        return {g: np.repeat(a, m, axis=0).astype(np.float64) for g, a in clip.points.items()}
    if m == 1:
        return {g: np.array(a[:1], dtype=np.float64) for g, a in clip.points.items()}
    pos = np.linspace(0.0, n - 1, m)
    lo = np.floor(pos).astype(int)
    hi = np.minimum(lo + 1, n - 1)
    w = (pos - lo)[:, None, None]
    out = {}
    for g, a in clip.points.items():
        r = np.where(a[lo] == a[hi], a[lo], (1 - w) * a[lo] + w * a[hi])
        r[-1] = a[-1]
        r[0] = a[0]
        out[g] = r
    return out


def overlap(window: int, len_a: int, len_b: int) -> int:
    """Effective crossfade length; below 2 frames the segments are simply butted together."""
    k = min(window, len_a // 2, len_b // 2)
    return k if k >= 2 else 0


def crossfade_weights(k: int) -> np.ndarray:
    return np.arange(k) / (k - 1)


def frame_count(lengths: Sequence[int], window: int) -> int:
    total = sum(lengths)
    for a, b in zip(lengths, lengths[1:]):
        total -= overlap(window, a, b)
    return total


def _stitch(segments: list[Segment], window: int):
    groups = list(segments[0].points)
    out = {g: [segments[0].points[g]] for g in groups}
    tags = [segments[0].tag] * len(segments[0])
    bound = 0.0
    for i in range(1, len(segments)):
        prev_len = len(segments[i - 1])
        cur = segments[i]
        k = overlap(window, prev_len, len(cur))
        if k == 0:
            for g in groups:
                gap = np.linalg.norm(cur.points[g][0] - out[g][-1][-1], axis=-1).max()
                bound = max(bound, float(gap))
                out[g].append(cur.points[g])
            tags += [cur.tag] * len(cur)
            continue
        w = crossfade_weights(k)[:, None, None]
        for g in groups:
            tail = out[g][-1][-k:]
            head = cur.points[g][:k]
            gap = np.linalg.norm(head - tail, axis=-1).max()
            bound = max(bound, float(gap) / (k - 1))
            mixed = np.where(tail == head, tail, (1 - w) * tail + w * head)
            out[g][-1] = out[g][-1][:-k]
            out[g].append(mixed)
            out[g].append(cur.points[g][k:])
        tags = tags[:-k] + [f"blend:{segments[i - 1].tag}>{cur.tag}"] * k + [cur.tag] * (len(cur) - k)
    return {g: np.concatenate(out[g]) for g in groups}, tags, bound


def blend(plan: SynthesisPlan, d: SignDictionary, bookend_seconds: float = 0.5,
          flags: dict | None = None) -> PoseSequence:
    fps, window = plan.fps, plan.window
    hold = max(1, math.floor(bookend_seconds * fps + 0.5))
    neutral = {g: np.repeat(np.asarray(d.neutral_pose.points[g], dtype=np.float64)[None], hold, axis=0)
               for g in d.schema.groups}
    segments = [Segment(neutral, "neutral")]
    for i, (gloss, clip_id) in enumerate(zip(plan.glosses, plan.chosen)):
        segments.append(Segment(resample(d.clips[clip_id], fps), f"{i}:{gloss}"))
    segments.append(Segment({g: a.copy() for g, a in neutral.items()}, "neutral"))
    points, tags, bound = _stitch(segments, window)
    meta = {"bookend_frames": hold, "window": window, "chosen": list(plan.chosen),
            "costs": list(plan.costs), "crossfade_bound": bound,
            "segment_lengths": [len(s) for s in segments]}
    return PoseSequence(points, tuple(tags), fps, plan.glosses, dict(flags or {}), d.schema, meta)


def max_step(points: dict[str, np.ndarray]) -> float:
    """Largest per-landmark displacement between consecutive frames."""
    best = 0.0
    for a in points.values():
        if a.shape[0] > 1:
            best = max(best, float(np.linalg.norm(np.diff(a, axis=0), axis=-1).max()))
    return best
