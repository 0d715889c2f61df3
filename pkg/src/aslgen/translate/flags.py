"""The four non-manual-marker flags and their label format."""
from __future__ import annotations

import re
from dataclasses import astuple, dataclass, fields

FLAG_NAMES = ("ynq", "whq", "conditional", "negation")

WH_WORDS = frozenset({"who", "what", "when", "where", "why", "which", "how", "whose", "whom"})
NEGATION_WORDS = frozenset({
    "not", "no", "never", "none", "nobody", "nothing", "nowhere", "neither", "nor",
    "cannot", "can't", "don't", "doesn't", "didn't", "won't", "isn't", "aren't",
    "wasn't", "weren't", "haven't", "hasn't", "hadn't", "shouldn't", "wouldn't",
    "couldn't", "mustn't",
})
CONDITIONAL_WORDS = frozenset({"if", "unless"})


class MalformedLabel(ValueError):
    pass


@dataclass(frozen=True)
class LinguisticFlags:
    ynq: bool = False
    whq: bool = False
    conditional: bool = False
    negation: bool = False

    def to_label(self) -> str:
        return ",".join("1" if v else "0" for v in astuple(self))

    def as_dict(self) -> dict[str, bool]:
        return {f.name: getattr(self, f.name) for f in fields(self)}


def parse_label(text: str) -> LinguisticFlags:
    """Parse ``"1,0,0,0"`` (whitespace tolerated) into flags."""
    fields_ = [f.strip() for f in text.strip().split(",")]
    if len(fields_) != 4 or any(f not in ("0", "1") for f in fields_):
        raise MalformedLabel(f"expected four comma-separated 0/1 labels, got {text!r}")
    return LinguisticFlags(*(f == "1" for f in fields_))


def rule_flags(sentence: str) -> LinguisticFlags:
    """Offline heuristic used when no provider is configured."""
    words = re.findall(r"[a-z']+", sentence.lower())
    question = sentence.rstrip().endswith("?")
    whq = question and bool(words) and words[0] in WH_WORDS
    return LinguisticFlags(
        ynq=question and not whq,
        whq=whq,
        conditional=any(w in CONDITIONAL_WORDS for w in words),
        negation=any(w in NEGATION_WORDS or w.endswith("n't") for w in words),
    )
