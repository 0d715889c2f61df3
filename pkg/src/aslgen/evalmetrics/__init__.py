"""Translation-quality metrics over whitespace-tokenized gloss strings."""
from ._common import LengthMismatch
from .bleu import bleu
from .chrf import chrf
from .flags import FlagScore, FlagScores, flag_scores
from .meteor import meteor
from .report import METRIC_GROUPS, MetricReport, score_corpus
from .rouge import rouge_l
from .ter import ter

__all__ = [
    "LengthMismatch", "bleu", "chrf", "meteor", "rouge_l", "ter", "flag_scores",
    "FlagScore", "FlagScores", "MetricReport", "score_corpus", "METRIC_GROUPS",
]
