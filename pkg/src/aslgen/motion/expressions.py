"""Eyebrow displacement for yes/no and wh- questions."""
from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np

from ..posedict.schema import FACE
from ..translate.flags import LinguisticFlags
from .sequence import PoseSequence


@dataclass(frozen=True)
class ExpressionProfile:
    brow_indices: tuple[int, ...]
    raise_delta: float
    furrow_delta: float

    @classmethod
    def from_json(cls, d: dict) -> "ExpressionProfile":
        idx = tuple(int(i) for i in d["brow_right"]) + tuple(int(i) for i in d["brow_left"])
        return cls(idx, float(d["raise_delta"]), float(d["furrow_delta"]))


def load_profile(path: str | Path | None = None) -> ExpressionProfile:
    if path is None:
        text = resources.files("aslgen.data").joinpath("expression_profile.json").read_text(encoding="utf-8")
    else:
        text = Path(path).read_text(encoding="utf-8")
    return ExpressionProfile.from_json(json.loads(text))


def ramp(n: int, edge: int) -> np.ndarray:
    """0 at both ends, 1 in the middle, linear over ``edge`` frames each side."""
    r = np.ones(n)
    edge = min(edge, n // 2)
    if edge >= 1:
        up = np.arange(edge) / edge
        r[:edge] = up
        r[n - edge:] = up[::-1]
    return r


def blend_expressions(seq: PoseSequence, flags: LinguisticFlags, profile: ExpressionProfile) -> PoseSequence:
    """Shift brow landmarks up (ynq) or down (whq); ynq wins when both are set."""
    merged = {**seq.flags, **flags.as_dict()}
    if flags.ynq:
        dy = -profile.raise_delta
    elif flags.whq:
        dy = profile.furrow_delta
    else:
        return seq.with_points(seq.points, flags=merged)
    edge = int(seq.meta.get("bookend_frames", 0))
    r = ramp(len(seq), edge)
    face = seq.points[FACE].copy()
    idx = np.asarray(profile.brow_indices)
    face[:, idx, 1] += (r * dy)[:, None]
    points = dict(seq.points)
    points[FACE] = face
    return seq.with_points(points, flags=merged)
