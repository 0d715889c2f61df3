"""Frame quality tiers: missing landmarks, motion blur, hand landmark jumps."""
from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from ..posedict.schema import HANDS, PoseClip
from .flow import blur_score


class SeriesTooShort(ValueError):
    pass


class Tier(enum.Enum):
    MISSING = "rejected-missing"
    BLUR = "rejected-blur"
    JUMP = "rejected-jump"
    ACCEPTED = "accepted"


@dataclass(frozen=True)
class QcThresholds:
    flow_mag_max: float = 4.0
    window: int = 5
    jump_max: float = 0.05
    apply_to: tuple[str, ...] = HANDS

    def __post_init__(self):
        if self.window < 2:
            raise ValueError("window must be at least 2")
        if not (self.flow_mag_max > 0 and self.jump_max > 0):
            raise ValueError("thresholds must be positive")

    @classmethod
    def from_mapping(cls, d: dict) -> "QcThresholds":
        known = {"flow_mag_max", "window", "jump_max", "apply_to"}
        unknown = set(d) - known
        if unknown:
            raise ValueError(f"unknown threshold keys: {sorted(unknown)}")
        kw = dict(d)
        if "apply_to" in kw:
            kw["apply_to"] = tuple(kw["apply_to"])
        if "window" in kw:
            kw["window"] = int(kw["window"])
        return cls(**kw)


@dataclass
class QcReport:
    tiers: list[Tier]
    blur: list[float] = field(default_factory=list)

    @property
    def all(self) -> set[int]:
        return set(range(len(self.tiers)))

    @property
    def valid(self) -> set[int]:
        return {t for t, tier in enumerate(self.tiers) if tier is not Tier.MISSING}

    @property
    def proposed(self) -> set[int]:
        return {t for t, tier in enumerate(self.tiers) if tier is Tier.ACCEPTED}

    def rejected(self) -> list[int]:
        return sorted(self.all - self.proposed)

    def to_json(self) -> dict:
        return {"tiers": [t.value for t in self.tiers], "blur": self.blur,
                "counts": {t.value: sum(1 for x in self.tiers if x is t) for t in Tier}}


def landmark_jump(frames: np.ndarray, th: QcThresholds, valid: Sequence[bool] | None = None) -> np.ndarray:
    """Flag frame t when any landmark is farther than jump_max from its mean over the previous window.

    ``frames`` has shape (T, n, d). Invalid frames are excluded from window means and never flagged.
    """
    x = np.asarray(frames, dtype=np.float64)
    n = x.shape[0]
    if n < th.window:
        raise SeriesTooShort(f"{n} frames, window {th.window}")
    ok = np.ones(n, bool) if valid is None else np.asarray(valid, bool)
    flags = np.zeros(n, bool)
    if math.isinf(th.jump_max):
        return flags
    for t in range(th.window, n):
        if not ok[t]:
            continue
        prev = ok[t - th.window:t]
        if not prev.any():
            continue
        mean = x[t - th.window:t][prev].mean(axis=0)
        if np.linalg.norm(x[t] - mean, axis=-1).max() > th.jump_max:
            flags[t] = True
    return flags


def classify_frames(clip: PoseClip, images: Sequence[np.ndarray] | None, th: QcThresholds = QcThresholds(),
                    blur_scores: Sequence[float] | None = None) -> QcReport:
    """Tier each frame; priority missing > blur > jump.

    Blur compares frame t with t-1 and rejects t; frame 0 has no predecessor.
    """
    n = len(clip)
    missing = np.zeros(n, bool)
    for g in clip.schema.groups:
        missing |= ~np.asarray(clip.valid[g], bool)
    if blur_scores is None:
        if images is not None:
            if len(images) != n:
                raise ValueError(f"{len(images)} images for {n} frames")
            blur_scores = [0.0] + [blur_score(images[t - 1], images[t]) for t in range(1, n)]
        else:
            blur_scores = [0.0] * n
    blur = np.asarray(blur_scores, dtype=np.float64) > th.flow_mag_max
    jump = np.zeros(n, bool)
    if n >= th.window:
        for g in th.apply_to:
            jump |= landmark_jump(clip.points[g], th, clip.valid[g])
    tiers = []
    for t in range(n):
        if missing[t]:
            tiers.append(Tier.MISSING)
        elif blur[t]:
            tiers.append(Tier.BLUR)
        elif jump[t]:
            tiers.append(Tier.JUMP)
        else:
            tiers.append(Tier.ACCEPTED)
    return QcReport(tiers, [float(s) for s in blur_scores])


def save_qc_reports(reports: dict[str, QcReport], path: str | Path, th: QcThresholds) -> None:
    doc = {"thresholds": {"flow_mag_max": th.flow_mag_max, "window": th.window, "jump_max": th.jump_max,
                          "apply_to": list(th.apply_to)},
           "clips": {cid: {**r.to_json(), "drop": r.rejected()} for cid, r in sorted(reports.items())}}
    Path(path).write_text(json.dumps(doc, indent=1, sort_keys=True), encoding="utf-8")


def load_drop_frames(path: str | Path) -> dict[str, list[int]]:
    """Per-clip rejected frame indices from a saved QC report."""
    doc = json.loads(Path(path).read_text(encoding="utf-8"))
    return {cid: list(v["drop"]) for cid, v in doc["clips"].items()}
