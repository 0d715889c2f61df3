"""Landmark schema, single frames and clips.

Coordinates live in normalized canvas units (x right, y down).  Body and face
are 2D, hands are 3D with z pointing away from the camera-facing side.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Mapping

import numpy as np

BODY, FACE, LEFT_HAND, RIGHT_HAND = "body", "face", "left_hand", "right_hand"
HANDS = (LEFT_HAND, RIGHT_HAND)

# body landmark indices used by normalization and rendering
L_SHOULDER, R_SHOULDER = 11, 12
# hand landmark indices
WRIST, INDEX_MCP, PINKY_MCP = 0, 5, 17


class SchemaMismatch(ValueError):
    pass


@dataclass(frozen=True)
class Schema:
    name: str = "holistic-543"
    counts: tuple[tuple[str, int], ...] = ((BODY, 33), (FACE, 468), (LEFT_HAND, 21), (RIGHT_HAND, 21))
    dims: tuple[tuple[str, int], ...] = ((BODY, 2), (FACE, 2), (LEFT_HAND, 3), (RIGHT_HAND, 3))

    @property
    def groups(self) -> tuple[str, ...]:
        return tuple(g for g, _ in self.counts)

    def count(self, group: str) -> int:
        return dict(self.counts)[group]

    def dim(self, group: str) -> int:
        return dict(self.dims)[group]

    def shape(self, group: str) -> tuple[int, int]:
        return self.count(group), self.dim(group)

    def to_json(self) -> dict:
        return {"name": self.name, "counts": dict(self.counts), "dims": dict(self.dims)}

    @classmethod
    def from_json(cls, d: Mapping) -> "Schema":
        counts = tuple((g, int(n)) for g, n in d["counts"].items())
        dims = tuple((g, int(d["dims"][g])) for g, _ in counts)
        return cls(d["name"], counts, dims)


DEFAULT_SCHEMA = Schema()


@dataclass(frozen=True, eq=False)
class PoseFrame:
    points: Mapping[str, np.ndarray]
    valid: Mapping[str, bool]
    schema: Schema = DEFAULT_SCHEMA

    def __getitem__(self, group: str) -> np.ndarray:
        return self.points[group]

    def to_json(self) -> dict:
        return {"schema": self.schema.to_json(),
                "points": {g: np.asarray(self.points[g]).round(12).tolist() for g in self.schema.groups},
                "valid": {g: bool(self.valid[g]) for g in self.schema.groups}}

    @classmethod
    def from_json(cls, d: Mapping) -> "PoseFrame":
        schema = Schema.from_json(d["schema"]) if "schema" in d else DEFAULT_SCHEMA
        pts = {g: np.asarray(d["points"][g], dtype=np.float64).reshape(schema.shape(g))
               for g in schema.groups}
        return cls(pts, {g: bool(d["valid"][g]) for g in schema.groups}, schema)


@dataclass(frozen=True, eq=False)
class PoseClip:
    """A landmark stream; ``points[g]`` has shape (T, count, dim), ``valid[g]`` shape (T,)."""

    id: str
    gloss: str
    points: Mapping[str, np.ndarray]
    valid: Mapping[str, np.ndarray]
    fps: float = 30.0
    signer: str = ""
    trim: tuple[int, int] | None = None
    schema: Schema = DEFAULT_SCHEMA
    meta: Mapping[str, object] = field(default_factory=dict)

    def __post_init__(self):
        if self.fps <= 0:
            raise ValueError("fps must be positive")
        n = len(self)
        for g in self.schema.groups:
            if self.points[g].shape != (n, *self.schema.shape(g)):
                raise SchemaMismatch(f"{self.id}: group {g} has shape {self.points[g].shape}")
            if np.shape(self.valid[g]) != (n,):
                raise SchemaMismatch(f"{self.id}: validity of {g} has shape {np.shape(self.valid[g])}")
        if self.trim is None:
            object.__setattr__(self, "trim", (0, n))
        s, e = self.trim
        if not 0 <= s < e <= n:
            raise ValueError(f"{self.id}: bad trim {self.trim} for {n} frames")

    def __len__(self) -> int:
        return int(self.points[self.schema.groups[0]].shape[0])

    def frame(self, t: int) -> PoseFrame:
        return PoseFrame({g: self.points[g][t] for g in self.schema.groups},
                         {g: bool(self.valid[g][t]) for g in self.schema.groups}, self.schema)

    @property
    def frames(self) -> list[PoseFrame]:
        return [self.frame(t) for t in range(len(self))]

    @property
    def fully_valid(self) -> bool:
        return all(bool(np.all(self.valid[g])) for g in self.schema.groups)

    def with_arrays(self, points=None, valid=None, **kw) -> "PoseClip":
        n_points = points if points is not None else self.points
        n_valid = valid if valid is not None else self.valid
        n = int(next(iter(n_points.values())).shape[0])
        kw.setdefault("trim", (0, n) if n != len(self) else self.trim)
        return replace(self, points=n_points, valid=n_valid, **kw)


def clip_from_frames(id: str, gloss: str, frames: list[PoseFrame], fps: float = 30.0,
                     signer: str = "", trim=None, meta=None) -> PoseClip:
    if not frames:
        raise ValueError("clip needs at least one frame")
    schema = frames[0].schema
    pts = {g: np.stack([np.asarray(f.points[g], dtype=np.float64) for f in frames]) for g in schema.groups}
    val = {g: np.array([bool(f.valid[g]) for f in frames]) for g in schema.groups}
    return PoseClip(id, gloss, pts, val, fps, signer, trim, schema, meta or {})


def constant_clip(id: str, gloss: str, frame: PoseFrame, n: int, fps: float = 30.0) -> PoseClip:
    return clip_from_frames(id, gloss, [frame] * n, fps)


def check_same_schema(a: Schema, b: Schema) -> None:
    if a != b:
        raise SchemaMismatch(f"schema {a.name} vs {b.name}")
