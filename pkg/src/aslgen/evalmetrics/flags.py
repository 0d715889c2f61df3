from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from ..translate.flags import FLAG_NAMES, LinguisticFlags
from ._common import LengthMismatch


@dataclass(frozen=True)
class FlagScore:
    tp: int
    fp: int
    fn: int

    @property
    def precision(self) -> float | None:
        d = self.tp + self.fp
        return self.tp / d if d else None

    @property
    def recall(self) -> float | None:
        d = self.tp + self.fn
        return self.tp / d if d else None


@dataclass(frozen=True)
class FlagScores:
    per_flag: dict[str, FlagScore]

    def __getitem__(self, name: str) -> FlagScore:
        return self.per_flag[name]

    def as_dict(self) -> dict:
        return {k: {"tp": s.tp, "fp": s.fp, "fn": s.fn,
                    "precision": s.precision, "recall": s.recall}
                for k, s in self.per_flag.items()}


def flag_scores(pred: Sequence[LinguisticFlags], gold: Sequence[LinguisticFlags]) -> FlagScores:
    """Per-flag confusion counts; undefined precision/recall are ``None``."""
    if len(pred) != len(gold):
        raise LengthMismatch(f"{len(pred)} predictions vs {len(gold)} gold labels")
    out = {}
    for name in FLAG_NAMES:
        tp = fp = fn = 0
        for p, g in zip(pred, gold):
            pv, gv = getattr(p, name), getattr(g, name)
            tp += pv and gv
            fp += pv and not gv
            fn += gv and not pv
        out[name] = FlagScore(int(tp), int(fp), int(fn))
    return FlagScores(out)
