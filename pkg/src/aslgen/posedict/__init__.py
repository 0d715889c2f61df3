"""Pose clips and the preprocessed sign dictionary."""
from .dictionary import (
    DictionaryConfig, IngestReport, SignDictionary, build_dictionary, compute_neutral,
    default_neutral, load_dictionary, preprocess_clip, save_dictionary,
)
from .io import read_clip, read_clip_binary, read_clip_jsonl, write_clip_binary, write_clip_jsonl
from .preprocess import BodyTarget, DegenerateScale, NoValidData, impute, normalize_clip, retime, trim
from .schema import (
    BODY, DEFAULT_SCHEMA, FACE, HANDS, LEFT_HAND, RIGHT_HAND, PoseClip, PoseFrame, Schema,
    SchemaMismatch, clip_from_frames, constant_clip,
)

__all__ = [name for name in dir() if not name.startswith("_")]
