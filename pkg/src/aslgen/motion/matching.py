"""Economy-of-motion variant selection."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..gloss import QUESTION_MARKER, GlossSentence, Kind, render_token
from ..posedict.dictionary import SignDictionary
from ..posedict.schema import BODY, FACE, HANDS, PoseClip, SchemaMismatch, constant_clip


class MissingGloss(KeyError):
    pass


@dataclass(frozen=True)
class MatchWeights:
    alpha_body: float = 1.0
    alpha_face: float = 0.25
    alpha_hands: float = 0.5

    def __post_init__(self):
        vals = (self.alpha_body, self.alpha_face, self.alpha_hands)
        if any(v < 0 for v in vals) or not any(v > 0 for v in vals):
            raise ValueError("weights must be nonnegative and not all zero")

    def for_group(self, group: str) -> float:
        if group == BODY:
            return self.alpha_body
        if group == FACE:
            return self.alpha_face
        if group in HANDS:
            return self.alpha_hands
        return 0.0


@dataclass(frozen=True)
class SynthesisPlan:
    glosses: tuple[str, ...]
    chosen: tuple[str, ...]
    costs: tuple[float, ...]
    window: int = 20
    fps: float = 90.0


def transition_cost(prev: PoseClip, nxt: PoseClip, w: MatchWeights) -> float:
    """Weighted squared distance between prev's last frame and next's first frame."""
    if prev.schema != nxt.schema:
        raise SchemaMismatch(f"{prev.id} and {nxt.id} use different landmark schemas")
    total = 0.0
    for g in prev.schema.groups:
        a = w.for_group(g)
        if a:
            d = prev.points[g][-1] - nxt.points[g][0]
            total += a * float(np.sum(d * d))
    return total


def expand_units(glosses: GlossSentence | Sequence[str], d: SignDictionary) -> list[str]:
    """Dictionary keys to realize, spelling fingerspelled words letter by letter when needed."""
    if isinstance(glosses, GlossSentence):
        tokens = list(glosses.tokens)
    else:
        from ..gloss import parse_token
        tokens = [parse_token(g) for g in glosses]
    units: list[str] = []
    for tok in tokens:
        key = render_token(tok)
        if key in d:
            units.append(key)
            continue
        if tok.kind is Kind.FINGERSPELLED:
            whole = "fs-" + "-".join(tok.letters)
            if whole in d:
                units.append(whole)
            else:
                units.extend(f"fs-{c}" for c in tok.letters)
            if tok.question:
                units.append(QUESTION_MARKER)
            continue
        units.append(key)
    return units


def select_variants(d: SignDictionary, glosses: GlossSentence | Sequence[str],
                    w: MatchWeights = MatchWeights(), window: int = 20, fps: float = 90.0) -> SynthesisPlan:
    """Greedy per-step argmin of the transition cost, starting from the neutral pose."""
    units = expand_units(glosses, d)
    if not units:
        raise MissingGloss("empty gloss sequence")
    missing = [u for u in units if u not in d]
    if missing:
        raise MissingGloss(f"no clips for {missing}")
    prev = constant_clip("<neutral>", "<neutral>", d.neutral_pose, 1)
    chosen, costs = [], []
    for u in units:
        best_id, best_cost = None, np.inf
        for clip_id in sorted(d.by_gloss[u]):
            c = transition_cost(prev, d.clips[clip_id], w)
            if c < best_cost:
                best_id, best_cost = clip_id, c
        chosen.append(best_id)
        costs.append(float(best_cost))
        prev = d.clips[best_id]
    return SynthesisPlan(tuple(units), tuple(chosen), tuple(costs), window, fps)
