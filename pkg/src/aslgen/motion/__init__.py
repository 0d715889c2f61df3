"""Clip selection by economy of motion, blending, and expression overlays."""
from .blending import blend, crossfade_weights, frame_count, max_step, overlap, resample
from .expressions import ExpressionProfile, blend_expressions, load_profile
from .matching import (
    MatchWeights, MissingGloss, SynthesisPlan, expand_units, select_variants, transition_cost,
)
from .sequence import (
    PoseSequence, load_sequence, load_sequence_jsonl, save_sequence, save_sequence_jsonl,
)

__all__ = [name for name in dir() if not name.startswith("_")]
