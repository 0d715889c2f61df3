"""Clip files: line-delimited JSON (header record + one record per frame) and a binary twin."""
from __future__ import annotations

import json
from pathlib import Path
from typing import Iterable

import numpy as np

from .._container import read_container, write_container
from .schema import PoseClip, Schema

JSONL_SUFFIX = ".jsonl"
BINARY_SUFFIX = ".posc"


def _header(clip: PoseClip) -> dict:
    return {"type": "header", "id": clip.id, "gloss": clip.gloss, "signer": clip.signer,
            "fps": clip.fps, "trim": list(clip.trim), "schema": clip.schema.to_json(),
            "meta": dict(clip.meta)}


def write_clip_jsonl(clip: PoseClip, path: str | Path) -> None:
    groups = clip.schema.groups
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(json.dumps(_header(clip), sort_keys=True) + "\n")
        for t in range(len(clip)):
            rec = {g: clip.points[g][t].reshape(-1).round(9).tolist() for g in groups}
            rec["valid"] = [int(bool(clip.valid[g][t])) for g in groups]
            fh.write(json.dumps(rec, sort_keys=True) + "\n")


def read_clip_jsonl(path: str | Path) -> PoseClip:
    with open(path, encoding="utf-8") as fh:
        lines = [ln for ln in fh if ln.strip()]
    if not lines:
        raise ValueError(f"{path}: empty clip file")
    head = json.loads(lines[0])
    if head.get("type") != "header":
        raise ValueError(f"{path}: first record must be the header")
    schema = Schema.from_json(head["schema"])
    groups = schema.groups
    pts = {g: [] for g in groups}
    val = {g: [] for g in groups}
    for ln in lines[1:]:
        rec = json.loads(ln)
        for k, g in enumerate(groups):
            pts[g].append(np.asarray(rec[g], dtype=np.float64).reshape(schema.shape(g)))
            val[g].append(bool(rec["valid"][k]))
    if not lines[1:]:
        raise ValueError(f"{path}: clip has no frames")
    return PoseClip(head["id"], head["gloss"], {g: np.stack(pts[g]) for g in groups},
                    {g: np.array(val[g]) for g in groups}, float(head["fps"]), head.get("signer", ""),
                    tuple(head["trim"]), schema, head.get("meta", {}))


def write_clip_binary(clip: PoseClip, path: str | Path) -> None:
    arrays = {f"points/{g}": clip.points[g] for g in clip.schema.groups}
    arrays.update({f"valid/{g}": np.asarray(clip.valid[g], dtype=bool) for g in clip.schema.groups})
    write_container(path, _header(clip), arrays)


def read_clip_binary(path: str | Path) -> PoseClip:
    head, arrays = read_container(path)
    schema = Schema.from_json(head["schema"])
    return PoseClip(head["id"], head["gloss"], {g: arrays[f"points/{g}"] for g in schema.groups},
                    {g: arrays[f"valid/{g}"] for g in schema.groups}, float(head["fps"]),
                    head.get("signer", ""), tuple(head["trim"]), schema, head.get("meta", {}))


def read_clip(path: str | Path) -> PoseClip:
    path = Path(path)
    if path.suffix == BINARY_SUFFIX:
        return read_clip_binary(path)
    return read_clip_jsonl(path)


def iter_clip_files(directory: str | Path) -> Iterable[Path]:
    """Clip files in a directory, preferring the binary twin when both exist."""
    d = Path(directory)
    seen = set()
    for p in sorted(d.iterdir()):
        if p.suffix not in (JSONL_SUFFIX, BINARY_SUFFIX):
            continue
        stem = p.with_suffix("")
        if stem in seen:
            continue
        twin = stem.with_suffix(BINARY_SUFFIX)
        seen.add(stem)
        yield twin if twin.exists() else p
