"""The preprocessed, gloss-indexed sign dictionary."""
from __future__ import annotations

import json
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from importlib import resources
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from .._container import read_container, write_container
from ..gloss import QUESTION_MARKER, GlossError, Lexicon, is_classifier, normalize_gloss, tokenize
from .preprocess import (
    BodyTarget, impute, is_fingerspelling_gloss, normalize_clip, retime, similarity_params, trim,
)
from .schema import BODY, DEFAULT_SCHEMA, PoseClip, PoseFrame, Schema

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class DictionaryConfig:
    target: BodyTarget = BodyTarget()
    fingerspell_speedup: float = 1.5
    dominant_hand: str = "right_hand"
    workers: int = 1


@dataclass(frozen=True, eq=False)
class SignDictionary:
    clips: Mapping[str, PoseClip]
    by_gloss: Mapping[str, tuple[str, ...]]
    neutral_pose: PoseFrame
    schema: Schema = DEFAULT_SCHEMA

    def variants(self, gloss: str) -> list[PoseClip]:
        return [self.clips[i] for i in self.by_gloss.get(gloss, ())]

    def __contains__(self, gloss: str) -> bool:
        return gloss in self.by_gloss

    def __len__(self) -> int:
        return len(self.clips)


@dataclass
class IngestReport:
    accepted: list[str] = field(default_factory=list)
    skipped: list[dict] = field(default_factory=list)
    not_in_lexicon: list[str] = field(default_factory=list)

    def to_json(self) -> dict:
        return {"accepted": len(self.accepted), "skipped": self.skipped,
                "not_in_lexicon": sorted(set(self.not_in_lexicon))}


def default_neutral() -> PoseFrame:
    text = resources.files("aslgen.data").joinpath("neutral_pose.json").read_text(encoding="utf-8")
    return PoseFrame.from_json(json.loads(text))


def compute_neutral(clips: Iterable[PoseClip], rest_ids: Iterable[str] | None = None) -> PoseFrame:
    """Coordinate-wise median of first frames of the clips flagged as rest."""
    rest = set(rest_ids) if rest_ids is not None else None
    chosen = [c for c in clips if rest is None or c.id in rest]
    if not chosen:
        raise ValueError("no rest clips to compute a neutral pose from")
    schema = chosen[0].schema
    pts = {g: np.median(np.stack([c.points[g][0] for c in chosen]), axis=0) for g in schema.groups}
    return PoseFrame(pts, {g: True for g in schema.groups}, schema)


def neutral_in_clip_space(clip: PoseClip, neutral: PoseFrame, target: BodyTarget) -> PoseFrame:
    """Map the (normalized) neutral pose into the clip's raw coordinates."""
    valid = np.flatnonzero(np.asarray(clip.valid[BODY], dtype=bool))
    if valid.size == 0:
        return neutral
    probe = clip.with_arrays({g: a[valid[:1]] for g, a in clip.points.items()},
                             {g: np.ones(1, dtype=bool) for g in clip.points})
    s, m0 = similarity_params(probe, target)
    c = np.asarray(target.center, dtype=np.float64)
    pts = {}
    for g, a in neutral.points.items():
        a = np.asarray(a, dtype=np.float64) / s
        a[..., :2] += m0 - c / s
        pts[g] = a
    return PoseFrame(pts, dict(neutral.valid), neutral.schema)


def preprocess_clip(clip: PoseClip, neutral: PoseFrame, cfg: DictionaryConfig,
                    drop_frames: Sequence[int] = ()) -> PoseClip:
    """trim, impute, normalize, then speed up fingerspelling."""
    if drop_frames:
        valid = {g: np.asarray(v, dtype=bool).copy() for g, v in clip.valid.items()}
        for t in drop_frames:
            if 0 <= t < len(clip):
                for v in valid.values():
                    v[t] = False
        clip = clip.with_arrays(valid=valid)
    fs = is_fingerspelling_gloss(clip.gloss)
    out = trim(clip)
    out = impute(out, neutral_in_clip_space(out, neutral, cfg.target), fs, cfg.dominant_hand)
    out = normalize_clip(out, cfg.target)
    if fs and cfg.fingerspell_speedup != 1:
        out = retime(out, cfg.fingerspell_speedup)
    return out


def _ingest_one(args):
    clip, neutral, cfg, drop = args
    raw = clip.gloss
    if any(is_classifier(t) for t in tokenize(raw)):
        return clip.id, None, "classifier gloss excluded"
    try:
        gloss = normalize_gloss(raw)
    except GlossError as exc:
        return clip.id, None, f"gloss does not parse: {exc}"
    try:
        done = preprocess_clip(clip, neutral, cfg, drop)
    except ValueError as exc:
        return clip.id, None, f"{type(exc).__name__}: {exc}"
    return clip.id, replace(done, gloss=gloss), ""


def build_dictionary(raw_clips: Iterable[PoseClip], lexicon: Lexicon | None = None,
                     config: DictionaryConfig = DictionaryConfig(), neutral: PoseFrame | None = None,
                     dropped_frames: Mapping[str, Sequence[int]] | None = None,
                     ) -> tuple[SignDictionary, IngestReport]:
    """Preprocess and index clips by normalized gloss; bad clips are skipped and reported."""
    neutral = neutral if neutral is not None else default_neutral()
    dropped_frames = dropped_frames or {}
    jobs = [(c, neutral, config, tuple(dropped_frames.get(c.id, ()))) for c in raw_clips]
    if config.workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(config.workers) as pool:
            results = list(pool.map(_ingest_one, jobs, chunksize=16))
    else:
        results = [_ingest_one(j) for j in jobs]
    report = IngestReport()
    lexicon_glosses = frozenset(lexicon.vocabulary) if lexicon is not None else frozenset()
    clips: dict[str, PoseClip] = {}
    by_gloss: dict[str, list[str]] = {}
    for clip_id, clip, reason in results:
        if clip is None:
            report.skipped.append({"id": clip_id, "reason": reason})
            continue
        if clip_id in clips:
            report.skipped.append({"id": clip_id, "reason": "duplicate clip id"})
            continue
        clips[clip_id] = clip
        by_gloss.setdefault(clip.gloss, []).append(clip_id)
        report.accepted.append(clip_id)
        if lexicon_glosses and clip.gloss not in lexicon_glosses and not _spelled_or_marker(clip.gloss):
            report.not_in_lexicon.append(clip.gloss)
    for k in report.skipped:
        log.info("skipped clip %s: %s", k["id"], k["reason"])
    index = {g: tuple(sorted(ids)) for g, ids in sorted(by_gloss.items())}
    schema = next(iter(clips.values())).schema if clips else neutral.schema
    return SignDictionary(dict(sorted(clips.items())), index, neutral, schema), report


def _spelled_or_marker(gloss: str) -> bool:
    """Letter clips and the question marker are realized without lexicon entries."""
    return is_fingerspelling_gloss(gloss) or gloss == QUESTION_MARKER


# -- persistence -----------------------------------------------------------

def save_dictionary(d: SignDictionary, path: str | Path) -> None:
    ids = sorted(d.clips)
    header = {
        "format": "aslgen-dict/1",
        "schema": d.schema.to_json(),
        "neutral": d.neutral_pose.to_json(),
        "clips": [{"id": i, "gloss": d.clips[i].gloss, "signer": d.clips[i].signer,
                   "fps": d.clips[i].fps, "frames": len(d.clips[i])} for i in ids],
    }
    arrays = {}
    for g in d.schema.groups:
        if ids:
            arrays[f"points/{g}"] = np.concatenate([d.clips[i].points[g] for i in ids])
        else:
            arrays[f"points/{g}"] = np.zeros((0, *d.schema.shape(g)))
    write_container(path, header, arrays)


def load_dictionary(path: str | Path) -> SignDictionary:
    head, arrays = read_container(path)
    if head.get("format") != "aslgen-dict/1":
        raise ValueError(f"{path}: not a sign dictionary")
    schema = Schema.from_json(head["schema"])
    clips = {}
    by_gloss: dict[str, list[str]] = {}
    pos = 0
    for meta in head["clips"]:
        n = meta["frames"]
        pts = {g: arrays[f"points/{g}"][pos:pos + n] for g in schema.groups}
        val = {g: np.ones(n, dtype=bool) for g in schema.groups}
        clips[meta["id"]] = PoseClip(meta["id"], meta["gloss"], pts, val, meta["fps"],
                                     meta["signer"], None, schema)
        by_gloss.setdefault(meta["gloss"], []).append(meta["id"])
        pos += n
    return SignDictionary(clips, {g: tuple(sorted(v)) for g, v in sorted(by_gloss.items())},
                          PoseFrame.from_json(head["neutral"]), schema)
