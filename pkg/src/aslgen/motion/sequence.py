"""Synthesized pose sequences and their on-disk encodings (.posz binary, .jsonl text)."""
from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Mapping

import numpy as np

from .._container import read_container, write_container
from ..posedict.schema import DEFAULT_SCHEMA, PoseFrame, Schema


@dataclass(frozen=True, eq=False)
class PoseSequence:
    """``points[g]`` has shape (N, count, dim); ``markers[t]`` tags the source of frame t."""

    points: Mapping[str, np.ndarray]
    markers: tuple[str, ...]
    fps: float
    glosses: tuple[str, ...] = ()
    flags: Mapping[str, bool] = field(default_factory=dict)
    schema: Schema = DEFAULT_SCHEMA
    meta: Mapping[str, object] = field(default_factory=dict)

    def __post_init__(self):
        n = len(self.markers)
        if n == 0:
            raise ValueError("a pose sequence needs at least one frame")
        for g in self.schema.groups:
            if self.points[g].shape[0] != n:
                raise ValueError(f"group {g} has {self.points[g].shape[0]} frames, markers {n}")

    def __len__(self) -> int:
        return len(self.markers)

    def frame(self, t: int) -> PoseFrame:
        return PoseFrame({g: self.points[g][t] for g in self.schema.groups},
                         {g: True for g in self.schema.groups}, self.schema)

    def with_points(self, points: Mapping[str, np.ndarray], **kw) -> "PoseSequence":
        return replace(self, points=points, **kw)

    def header(self) -> dict:
        return {"format": "aslgen-seq/1", "fps": self.fps, "glosses": list(self.glosses),
                "flags": dict(self.flags), "schema": self.schema.to_json(),
                "markers": list(self.markers), "meta": dict(self.meta)}


def save_sequence(seq: PoseSequence, path: str | Path) -> None:
    write_container(path, seq.header(), {g: seq.points[g] for g in seq.schema.groups})


def load_sequence(path: str | Path) -> PoseSequence:
    head, arrays = read_container(path)
    if head.get("format") != "aslgen-seq/1":
        raise ValueError(f"{path}: not a pose sequence")
    schema = Schema.from_json(head["schema"])
    return PoseSequence({g: arrays[g] for g in schema.groups}, tuple(head["markers"]), head["fps"],
                        tuple(head["glosses"]), head["flags"], schema, head.get("meta", {}))


def save_sequence_jsonl(seq: PoseSequence, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(json.dumps({"type": "header", **seq.header()}, sort_keys=True) + "\n")
        for t in range(len(seq)):
            rec = {g: seq.points[g][t].reshape(-1).tolist() for g in seq.schema.groups}
            rec["marker"] = seq.markers[t]
            fh.write(json.dumps(rec, sort_keys=True) + "\n")


def load_sequence_jsonl(path: str | Path) -> PoseSequence:
    with open(path, encoding="utf-8") as fh:
        lines = [json.loads(ln) for ln in fh if ln.strip()]
    head = lines[0]
    schema = Schema.from_json(head["schema"])
    pts = {g: np.stack([np.asarray(r[g], dtype=np.float64).reshape(schema.shape(g)) for r in lines[1:]])
           for g in schema.groups}
    return PoseSequence(pts, tuple(r["marker"] for r in lines[1:]), head["fps"],
                        tuple(head["glosses"]), head["flags"], schema, head.get("meta", {}))
