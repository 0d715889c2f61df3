from __future__ import annotations

from dataclasses import dataclass, replace
from pathlib import Path
from typing import Sequence

import numpy as np

from ..gloss import normalize_gloss


@dataclass(frozen=True)
class TranslationExample:
    english: str
    gloss: str
    anonymized_english: str | None = None
    embedding: np.ndarray | None = None

    def with_embedding(self, vec: np.ndarray) -> "TranslationExample":
        return replace(self, embedding=vec)


def read_corpus_tsv(path: str | Path, normalize: bool = True) -> list[TranslationExample]:
    """``english<TAB>gloss`` lines; ``#`` comments and blank lines skipped."""
    out = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.rstrip("\n")
            if not line.strip() or line.startswith("#"):
                continue
            if "\t" not in line:
                raise ValueError(f"{path}:{lineno}: expected english<TAB>gloss")
            english, gloss = line.split("\t", 1)
            out.append(TranslationExample(english.strip(), normalize_gloss(gloss) if normalize else gloss.strip()))
    return out


def write_corpus_tsv(examples: Sequence[TranslationExample], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for ex in examples:
            fh.write(f"{ex.english}\t{ex.gloss}\n")
