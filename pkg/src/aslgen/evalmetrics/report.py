from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Iterable, Sequence

from .bleu import bleu
from .chrf import chrf
from .meteor import meteor
from .rouge import rouge_l
from .ter import ter

METRIC_GROUPS = ("bleu", "rouge", "meteor", "chrf", "ter")


@dataclass(frozen=True)
class MetricReport:
    bleu1: float | None = None
    bleu2: float | None = None
    bleu3: float | None = None
    bleu4: float | None = None
    rouge_l: float | None = None
    meteor: float | None = None
    chrf: float | None = None
    ter: float | None = None

    def as_dict(self) -> dict[str, float]:
        return {k: v for k, v in asdict(self).items() if v is not None}


def score_corpus(hyp: Sequence[str], ref: Sequence[str],
                 metrics: Iterable[str] = METRIC_GROUPS) -> MetricReport:
    metrics = set(metrics)
    unknown = metrics - set(METRIC_GROUPS)
    if unknown:
        raise ValueError(f"unknown metrics: {sorted(unknown)}")
    vals: dict[str, float] = {}
    if "bleu" in metrics:
        for n in range(1, 5):
            vals[f"bleu{n}"] = bleu(hyp, ref, n)
    if "rouge" in metrics:
        vals["rouge_l"] = rouge_l(hyp, ref)
    if "meteor" in metrics:
        vals["meteor"] = meteor(hyp, ref)
    if "chrf" in metrics:
        vals["chrf"] = chrf(hyp, ref)
    if "ter" in metrics:
        vals["ter"] = ter(hyp, ref)
    return MetricReport(**vals)
