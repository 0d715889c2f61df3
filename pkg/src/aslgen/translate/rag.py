"""Name anonymization and cosine-similarity retrieval of in-context examples."""
from __future__ import annotations

import hashlib
import re
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .._container import read_container, write_container
from .corpus import TranslationExample
from .providers import ProviderClient

POSSESSIVE = {"he": "his", "she": "her", "they": "their"}
OBJECTIVE = {"he": "him", "she": "her", "they": "them"}
# a name right after one of these is in subject position
SUBJECT_CONTEXT = frozenset("""
and but or so because if when while that who which where what why how whether although
though since until unless after before do does did is was are were will would can could
shall should may might must has have had then also
""".split())
# capitalized words that are not person names
NOT_NAMES = frozenset("""
i i'm i've i'll i'd asl english deaf god monday tuesday wednesday thursday friday saturday
sunday january february march april may june july august september october november
december christmas thanksgiving easter ok okay mr mrs ms dr
""".split())

_WORD = re.compile(r"[A-Za-z][A-Za-z'’]*")


class DimensionMismatch(ValueError):
    pass


@lru_cache(maxsize=1)
def default_names() -> dict[str, str]:
    text = resources.files("aslgen.data").joinpath("names.tsv").read_text(encoding="utf-8")
    return read_names(text.splitlines())


def read_names(lines) -> dict[str, str]:
    out = {}
    for line in lines:
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        name, pronoun = line.split("\t")
        out[name.strip().lower()] = pronoun.strip().lower()
    return out


def _previous_word(text: str, start: int) -> str:
    m = re.search(r"([A-Za-z']+)[^A-Za-z']*$", text[:start])
    return m.group(1).lower() if m else ""


def _sentence_initial(text: str, start: int) -> bool:
    before = text[:start].rstrip(" \t\"'(“‘")
    return not before or before[-1] in ".!?\n"


def anonymize(sentence: str, names: Mapping[str, str] | None = None) -> str:
    """Replace capitalized person names with third-person pronouns.

    Names come from the shipped name list; a capitalized word that is not
    sentence-initial and not a known non-name is also treated as a name.
    """
    names = default_names() if names is None else names

    def repl(m: re.Match) -> str:
        word = m.group(0)
        if not word[0].isupper():
            return word
        possessive = False
        stem = word
        if stem.lower().endswith(("'s", "’s")):
            stem, possessive = stem[:-2], True
        key = stem.lower()
        initial = _sentence_initial(sentence, m.start())
        if key in names:
            pronoun = names[key]
        elif (not initial and key not in NOT_NAMES and not stem.isupper()
              and stem[1:].islower()):
            pronoun = "they"
        else:
            return word
        if possessive:
            out = POSSESSIVE.get(pronoun, pronoun)
        elif initial or _previous_word(sentence, m.start()) in SUBJECT_CONTEXT:
            out = pronoun
        else:
            out = OBJECTIVE.get(pronoun, pronoun)
        return out.capitalize() if initial else out

    return _WORD.sub(repl, sentence)


def text_key(text: str, model: str = "") -> str:
    return hashlib.sha256(f"{model}\x00{text}".encode("utf-8")).hexdigest()


def embed_corpus(corpus: Sequence[TranslationExample], client: ProviderClient, anonymized: bool,
                 cache_path: str | Path | None = None, model: str = "") -> list[TranslationExample]:
    """Attach unit-norm embeddings, reusing a sidecar cache keyed by text hash."""
    cache: dict[str, np.ndarray] = {}
    path = Path(cache_path) if cache_path else None
    if path and path.exists():
        header, arrays = read_container(path)
        for key, row in zip(header["keys"], arrays["vectors"]):
            cache[key] = row
    out = []
    dirty = False
    for ex in corpus:
        text = ex.english
        if anonymized:
            text = ex.anonymized_english or anonymize(ex.english)
        key = text_key(text, model)
        if key not in cache:
            v = np.asarray(client.embed(text), dtype=np.float64)
            cache[key] = v / np.linalg.norm(v)
            dirty = True
        out.append(TranslationExample(ex.english, ex.gloss,
                                      text if anonymized else ex.anonymized_english, cache[key]))
    if path and dirty:
        keys = sorted(cache)
        dims = {cache[k].shape for k in keys}
        if len(dims) != 1:
            raise DimensionMismatch(f"mixed embedding dimensions {sorted(dims)}")
        write_container(path, {"keys": keys, "model": model}, {"vectors": np.stack([cache[k] for k in keys])})
    return out


def retrieve_examples(corpus: Sequence[TranslationExample], query: str, n: int,
                      client: ProviderClient, anonymized: bool) -> list[TranslationExample]:
    """Top-n examples by cosine similarity, descending; ties keep corpus order."""
    if not 1 <= n <= len(corpus):
        raise ValueError(f"n must be in 1..{len(corpus)}, got {n}")
    if any(ex.embedding is None for ex in corpus):
        raise ValueError("every corpus example needs an embedding")
    dims = {np.shape(ex.embedding) for ex in corpus}
    if len(dims) != 1:
        raise DimensionMismatch(f"corpus embeddings have mixed shapes {sorted(dims)}")
    text = anonymize(query) if anonymized else query
    q = np.asarray(client.embed(text), dtype=np.float64)
    E = np.stack([np.asarray(ex.embedding, dtype=np.float64) for ex in corpus])
    if q.shape != E.shape[1:]:
        raise DimensionMismatch(f"query dim {q.shape} vs corpus dim {E.shape[1:]}")
    sims = np.array([float(np.dot(row, q)) for row in E])
    sims /= np.linalg.norm(E, axis=1) * np.linalg.norm(q)
    order = np.lexsort((np.arange(len(corpus)), -sims))
    return [corpus[i] for i in order[:n]]


def similarities(corpus: Sequence[TranslationExample], query: str, client: ProviderClient,
                 anonymized: bool) -> np.ndarray:
    text = anonymize(query) if anonymized else query
    q = np.asarray(client.embed(text), dtype=np.float64)
    E = np.stack([np.asarray(ex.embedding, dtype=np.float64) for ex in corpus])
    return np.array([float(np.dot(row, q)) for row in E]) / (np.linalg.norm(E, axis=1) * np.linalg.norm(q))
