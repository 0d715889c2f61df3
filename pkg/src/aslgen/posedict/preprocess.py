"""Per-clip preprocessing: trim, impute, normalize and retime."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .schema import BODY, HANDS, L_SHOULDER, LEFT_HAND, R_SHOULDER, RIGHT_HAND, PoseClip, PoseFrame

EPS = 1e-9


class NoValidData(ValueError):
    pass


class DegenerateScale(ValueError):
    pass


@dataclass(frozen=True)
class BodyTarget:
    """Where frame 0's shoulder midpoint goes and how wide the shoulders become."""

    center: tuple[float, float] = (0.5, 0.42)
    shoulder_width: float = 0.3


def trim(clip: PoseClip) -> PoseClip:
    s, e = clip.trim
    if (s, e) == (0, len(clip)):
        return clip
    pts = {g: a[s:e].copy() for g, a in clip.points.items()}
    val = {g: v[s:e].copy() for g, v in clip.valid.items()}
    return clip.with_arrays(pts, val, trim=(0, e - s))


def _fill_group(x: np.ndarray, v: np.ndarray, neutral: np.ndarray | None, name: str) -> np.ndarray:
    v = np.asarray(v, dtype=bool)
    if v.all():
        return x.copy()
    out = x.copy()
    idx = np.flatnonzero(v)
    if idx.size == 0:
        if neutral is None:
            raise NoValidData(f"group {name} has no valid frame and no neutral pose")
        out[:] = neutral
        return out
    first, last = idx[0], idx[-1]
    lead = neutral if neutral is not None else x[first]
    tail = neutral if neutral is not None else x[last]
    out[:first] = lead
    out[last + 1:] = tail
    for t in np.flatnonzero(~v[first:last + 1]) + first:
        k = np.searchsorted(idx, t)
        a, b = idx[k - 1], idx[k]
        w = (t - a) / (b - a)
        out[t] = (1 - w) * x[a] + w * x[b]
    return out


def impute(clip: PoseClip, neutral: PoseFrame | None, is_fingerspelling: bool = False,
           dominant: str = RIGHT_HAND) -> PoseClip:
    """Fill invalid frames: edges from the neutral pose, interior runs by linear interpolation.

    Fingerspelling clips hold the non-dominant hand at neutral throughout.
    """
    pts, val = {}, {}
    for g in clip.schema.groups:
        ng = None if neutral is None else np.asarray(neutral.points[g], dtype=np.float64)
        pts[g] = _fill_group(clip.points[g], clip.valid[g], ng, g)
        val[g] = np.ones(len(clip), dtype=bool)
    if is_fingerspelling:
        other = LEFT_HAND if dominant == RIGHT_HAND else RIGHT_HAND
        if neutral is None:
            raise NoValidData("fingerspelling needs a neutral pose for the non-dominant hand")
        pts[other] = np.broadcast_to(np.asarray(neutral.points[other], dtype=np.float64),
                                     clip.points[other].shape).copy()
    return clip.with_arrays(pts, val)


def similarity_params(clip: PoseClip, target: BodyTarget) -> tuple[float, np.ndarray]:
    if not clip.valid[BODY][0]:
        raise DegenerateScale(f"{clip.id}: shoulders not valid in frame 0")
    b0 = clip.points[BODY][0]
    width = float(np.linalg.norm(b0[L_SHOULDER] - b0[R_SHOULDER]))
    if width < EPS:
        raise DegenerateScale(f"{clip.id}: shoulder width {width:g}")
    return target.shoulder_width / width, (b0[L_SHOULDER] + b0[R_SHOULDER]) / 2


def normalize_clip(clip: PoseClip, target: BodyTarget = BodyTarget()) -> PoseClip:
    """Scale and translate so frame 0's shoulders match ``target``; then pin every frame's
    shoulder midpoint to the target centre (so the running mean never drifts)."""
    s, m0 = similarity_params(clip, target)
    c = np.asarray(target.center, dtype=np.float64)
    body = clip.points[BODY]
    mids = (body[:, L_SHOULDER] + body[:, R_SHOULDER]) / 2
    # translation per frame, applied after scaling
    shift = c - s * mids
    shift[~np.asarray(clip.valid[BODY], dtype=bool)] = c - s * m0
    pts = {}
    for g in clip.schema.groups:
        a = clip.points[g].astype(np.float64, copy=True)
        a *= s
        a[..., :2] += shift[:, None, :]
        pts[g] = a
    return clip.with_arrays(pts, {g: v.copy() for g, v in clip.valid.items()})


def retime(clip: PoseClip, factor: float) -> PoseClip:
    """Speed up by ``factor``: duration / factor, linear resampling at the same fps."""
    if not (math.isfinite(factor) and factor > 0):
        raise ValueError("factor must be finite and positive")
    n = len(clip)
    # both endpoints survive, so never drop below two frames
    m = max(min(n, 2), math.floor(n / factor + 0.5))
    if m == n:
        return clip
    pos = np.linspace(0.0, n - 1, m) if m > 1 else np.zeros(1)
    lo = np.floor(pos).astype(int)
    hi = np.minimum(lo + 1, n - 1)
    w = pos - lo
    pts, val = {}, {}
    for g in clip.schema.groups:
        a = clip.points[g]
        wb = w[:, None, None]
        pts[g] = (1 - wb) * a[lo] + wb * a[hi]
        pts[g][w == 0] = a[lo[w == 0]]
        v = np.asarray(clip.valid[g], dtype=bool)
        val[g] = v[lo] & (v[hi] | (w == 0))
    return clip.with_arrays(pts, val, trim=(0, m))


def is_fingerspelling_gloss(gloss: str) -> bool:
    return gloss.startswith("fs-")
