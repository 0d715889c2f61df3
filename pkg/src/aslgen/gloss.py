"""ASL gloss tokens: parsing, rendering, normalization and the word->gloss lexicon.

Surface syntax handled here::

    GIVE  THANK-YOU  BOLD/TOUGH          plain English-based glosses
    fs-J-O-H-N  fs-JOHN  #EARLY          fingerspelling / loan signs
    ns-PARIS  MOTHER+FATHER  QMwg        name signs, compounds, question marker
    i:GIVE:j  1p:GIVE-3p-arc  ASK:i      agreement verbs and locus suffixes
    IX-3p:i  POSS-1p  SELF:i  IX-loc"under table"
    STUDY-continuative  LOOK-AT-recip:i,j  IX-3p-pl-2:x/y

plus the meaning-preserving decorations stripped by normalization:
repetition (``GIVE+``), number of hands (``(1h)``/``(2h)``) and ``alt.``.
"""
from __future__ import annotations

import logging
import re
from dataclasses import dataclass, field, replace
from enum import Enum
from pathlib import Path
from types import MappingProxyType
from typing import Iterable, Mapping, Sequence

log = logging.getLogger(__name__)

CANONICAL_LOCI = ("i", "j", "1p", "2p", "3p")

_LOCUS = r"(?:[a-z]|[123]p)"
_LOCUS_RE = re.compile(rf"^{_LOCUS}$")
_LOCUS_LIST_RE = re.compile(rf"^{_LOCUS}(?:[,/]{_LOCUS})*$")
_PERSON_RE = re.compile(r"^[123]p$")
_TOKEN_RE = re.compile(r'[^\s"]*"[^"]*"\S*|\S+')
_HANDS_RE = re.compile(r"\((1h|2h)\)")
# DCL, SCL, BPCL, CL:3, 3-CL:..., B-CL"..."
_CLASSIFIER_RE = re.compile(r'^(?:(?:[DSLBIP]|BP)?CL|[A-Z0-9]{1,3}-CL)(?:[:"\-.]|$)')
_FS_SPELLED_RE = re.compile(r"^[A-Za-z0-9](?:-[A-Za-z0-9])*$")
_FS_COMPACT_RE = re.compile(r"^[A-Za-z0-9]+$")

QUESTION_MARKER = "QMwg"
PRONOUN_HEADS = ("THUMB-IX", "IX", "POSS", "SELF")


class GlossError(ValueError):
    pass


class EmptyInput(GlossError):
    pass


class MalformedToken(GlossError):
    def __init__(self, message: str, token: str = "", index: int | None = None):
        super().__init__(message)
        self.token = token
        self.index = index


class Kind(str, Enum):
    LEXICAL = "Lexical"
    FINGERSPELLED = "Fingerspelled"
    NAME_SIGN = "NameSign"
    LOAN_SIGN = "LoanSign"
    COMPOUND = "Compound"
    QUESTION_MARK = "QuestionMark"


@dataclass(frozen=True)
class Agreement:
    subject_locus: str | None
    object_locus: str | None


@dataclass(frozen=True)
class GlossToken:
    raw: str
    kind: Kind
    base: str
    letters: tuple[str, ...] = ()
    parts: tuple["GlossToken", ...] = ()
    agreement: Agreement | None = None
    person: str | None = None
    plurality: str | None = None
    aspect: str | None = None
    locus: str | None = None
    # the gloss body as written, without loci and decorations
    body: str = ""
    quote: str | None = None
    question: bool = False
    repetition: int = 0
    hands: str | None = None
    alternating: bool = False

    @property
    def text(self) -> str:
        return render_token(self)

    @property
    def is_decorated(self) -> bool:
        if self.repetition or self.hands or self.alternating:
            return True
        return any(p.is_decorated for p in self.parts)


@dataclass(frozen=True)
class GlossSentence:
    tokens: tuple[GlossToken, ...]
    source_english: str | None = None

    def __str__(self) -> str:
        return " ".join(render_token(t) for t in self.tokens)

    def __len__(self) -> int:
        return len(self.tokens)

    def __iter__(self):
        return iter(self.tokens)


def tokenize(s: str) -> list[str]:
    """Whitespace tokenization that keeps quoted adverbials (``IX-loc"under table"``) whole."""
    return _TOKEN_RE.findall(s)


def is_locus(s: str) -> bool:
    return bool(_LOCUS_RE.match(s))


def is_classifier(token: str) -> bool:
    return bool(_CLASSIFIER_RE.match(_HANDS_RE.sub("", token)))


def parse_gloss(s: str, source_english: str | None = None) -> GlossSentence:
    if s is None or not s.strip():
        raise EmptyInput("empty gloss string")
    return GlossSentence(tuple(parse_token(t) for t in tokenize(s)), source_english)


def parse_token(s: str) -> GlossToken:
    if not s:
        raise MalformedToken("empty token", s)
    raw = s
    work = s

    quote = None
    qm = re.search(r'"([^"]*)"', work)
    if qm:
        quote = qm.group(1)
        work = work[: qm.start()] + work[qm.end():]

    hands = None
    hm = _HANDS_RE.search(work)
    if hm and (hm.start() == 0 or hm.end() == len(work)):
        hands = hm.group(1)
        work = work[: hm.start()] + work[hm.end():]
    alternating = False
    if work.startswith("alt."):
        alternating = True
        work = work[4:]

    work, repetition = _strip_repetition(work)

    if work == QUESTION_MARKER:
        return GlossToken(raw, Kind.QUESTION_MARK, QUESTION_MARKER, body=QUESTION_MARKER,
                          repetition=repetition, hands=hands, alternating=alternating)

    agreement = None
    locus = None
    pieces = work.split(":")
    if len(pieces) == 1:
        body = work
    elif len(pieces) == 2:
        a, b = pieces
        if not a or not b:
            raise MalformedToken(f"empty locus or gloss in {raw!r}", raw)
        if is_locus(a) and not _LOCUS_LIST_RE.match(b):
            agreement = Agreement(a, None)
            body = b
        elif _LOCUS_LIST_RE.match(b):
            body, locus = a, b
        else:
            body = work
    elif len(pieces) == 3 and is_locus(pieces[0]):
        a, body, b = pieces
        if not body or not b:
            raise MalformedToken(f"incomplete agreement syntax in {raw!r}", raw)
        if not is_locus(b):
            raise MalformedToken(f"object locus {b!r} is not a locus in {raw!r}", raw)
        if a == b:
            raise MalformedToken(f"subject and object loci coincide in {raw!r}", raw)
        agreement = Agreement(a, b)
    elif is_locus(pieces[0]) or pieces[0] == "":
        raise MalformedToken(f"too many ':' fields in {raw!r}", raw)
    else:
        body = work

    body, more_reps = _strip_repetition(body)
    repetition += more_reps
    question = False
    if body.endswith("-" + QUESTION_MARKER):
        question = True
        body = body[: -len(QUESTION_MARKER) - 1]
    if not body:
        raise MalformedToken(f"empty gloss body in {raw!r}", raw)

    common = dict(agreement=agreement, locus=locus, quote=quote, question=question,
                  repetition=repetition, hands=hands, alternating=alternating)
    return _parse_body(raw, body, common)


def _strip_repetition(s: str) -> tuple[str, int]:
    n = len(s) - len(s.rstrip("+"))
    return s[: len(s) - n], n


def _parse_body(raw: str, body: str, common: dict) -> GlossToken:
    if body.startswith("fs-"):
        rest = body[3:]
        letters = None
        if _FS_SPELLED_RE.match(rest):
            letters = tuple(c.upper() for c in rest.split("-"))
        elif _FS_COMPACT_RE.match(rest):
            letters = tuple(rest.upper())
        if letters:
            return GlossToken(raw, Kind.FINGERSPELLED, "".join(letters), letters=letters,
                              body="fs-" + "-".join(letters), **common)
    if body.startswith("ns-") and len(body) > 3:
        return GlossToken(raw, Kind.NAME_SIGN, body[3:], body=body, **common)
    if body.startswith("#") and len(body) > 1:
        return GlossToken(raw, Kind.LOAN_SIGN, body[1:], body=body, **common)
    if "+" in body:
        parts = tuple(parse_token(p) for p in body.split("+") if p)
        if len(parts) >= 2:
            return GlossToken(raw, Kind.COMPOUND, "+".join(p.base for p in parts),
                              parts=parts, body=body, **common)
    return _parse_lexical(raw, body, common)


def _parse_lexical(raw: str, body: str, common: dict) -> GlossToken:
    segs = body.split("-")
    person = plurality = None
    aspect_parts = []
    base_segs = []
    head_len = 0
    for head in PRONOUN_HEADS:
        h = head.split("-")
        if segs[: len(h)] == h:
            head_len = len(h)
            break
    i = 0
    while i < len(segs):
        seg = segs[i]
        if _PERSON_RE.match(seg) and person is None:
            person = seg
        elif seg == "pl" and i + 1 < len(segs):
            plurality = f"pl-{segs[i + 1]}"
            i += 1
        elif seg == "arc" and plurality is None:
            plurality = "arc"
        elif seg in ("loc", "dir") and head_len and i == head_len:
            base_segs.append(seg)
        elif seg and seg == seg.upper() and any(c.isalnum() for c in seg):
            base_segs.append(seg)
        elif seg:
            aspect_parts.append(seg)
        i += 1
    if head_len:
        base = "-".join(segs[:head_len] + ([person] if person else [])
                        + [s for s in base_segs[head_len:] if s in ("loc", "dir")])
    else:
        base = "-".join(base_segs) or body
    aspect = "-".join(aspect_parts) or None
    return GlossToken(raw, Kind.LEXICAL, base, person=person, plurality=plurality,
                      aspect=aspect, body=body, **common)


def render_token(tok: GlossToken) -> str:
    out = []
    if tok.hands:
        out.append(f"({tok.hands})")
    if tok.alternating:
        out.append("alt.")
    if tok.agreement and tok.agreement.subject_locus:
        out.append(tok.agreement.subject_locus + ":")
    if tok.kind is Kind.COMPOUND:
        out.append("+".join(render_token(p) for p in tok.parts))
    elif tok.kind is Kind.FINGERSPELLED:
        out.append("fs-" + "-".join(tok.letters))
    else:
        out.append(tok.body)
    if tok.quote is not None:
        out.append(f'"{tok.quote}"')
    if tok.question:
        out.append("-" + QUESTION_MARKER)
    out.append("+" * tok.repetition)
    if tok.agreement and tok.agreement.object_locus:
        out.append(":" + tok.agreement.object_locus)
    if tok.locus:
        out.append(":" + tok.locus)
    return "".join(out)


def _canonical_locus(x: str | None) -> str | None:
    if x is None or x in CANONICAL_LOCI:
        return x
    return "j"


def normalize_token(tok: GlossToken) -> GlossToken:
    agreement = tok.agreement
    if agreement is not None:
        subj = _canonical_locus(agreement.subject_locus)
        obj = _canonical_locus(agreement.object_locus)
        if subj == obj:
            # both collapsed onto j; keep them distinct
            subj = "i"
        agreement = Agreement(subj, obj)
    locus = tok.locus
    if locus is not None and is_locus(locus):
        locus = _canonical_locus(locus)
    parts = tuple(normalize_token(p) for p in tok.parts)
    body = tok.body
    if tok.kind is Kind.COMPOUND:
        body = "+".join(render_token(p) for p in parts)
    out = replace(tok, agreement=agreement, locus=locus, parts=parts, body=body,
                  repetition=0, hands=None, alternating=False)
    return replace(out, raw=render_token(out))


def normalize_gloss(s: str) -> str:
    """Canonical surface form of a gloss string (idempotent)."""
    return " ".join(render_token(normalize_token(t)) for t in parse_gloss(s).tokens)


def normalize_sentence(g: GlossSentence) -> GlossSentence:
    return GlossSentence(tuple(normalize_token(t) for t in g.tokens), g.source_english)


def fingerspell(word: str) -> str:
    letters = [c.upper() for c in word if c.isascii() and c.isalnum()]
    if not letters:
        raise ValueError(f"nothing to fingerspell in {word!r}")
    return "fs-" + "-".join(letters)


def fingerspell_token(word: str) -> GlossToken:
    return parse_token(fingerspell(word))


# -- lexicon ---------------------------------------------------------------


@dataclass(frozen=True)
class Lexicon:
    word_to_glosses: Mapping[str, tuple[str, ...]]
    gloss_to_clips: Mapping[str, tuple[str, ...]] = field(
        default_factory=lambda: MappingProxyType({}))
    oov_policy: str = "FingerspellFallback"
    rejected: tuple[tuple[str, str], ...] = ()

    def __contains__(self, word: str) -> bool:
        return word.strip().lower() in self.word_to_glosses

    @property
    def vocabulary(self) -> list[str]:
        """All distinct glosses, first-seen order."""
        seen: dict[str, None] = {}
        for glosses in self.word_to_glosses.values():
            for g in glosses:
                seen.setdefault(g, None)
        return list(seen)

    def link(self, gloss_to_clips: Mapping[str, Sequence[str]]) -> "Lexicon":
        frozen = MappingProxyType({g: tuple(ids) for g, ids in gloss_to_clips.items()})
        return replace(self, gloss_to_clips=frozen)

    def max_phrase_len(self) -> int:
        return max((len(k.split()) for k in self.word_to_glosses), default=1)


def build_lexicon(entries: Iterable[tuple[str, str]]) -> Lexicon:
    """Merge (word, gloss) pairs into a lexicon.

    Glosses are stored normalized, duplicates are merged keeping first-seen
    order per word, and classifier glosses are dropped into ``rejected``.
    """
    entries = list(entries)
    if not entries:
        raise ValueError("lexicon needs at least one entry")
    table: dict[str, list[str]] = {}
    rejected = []
    for i, (word, gloss) in enumerate(entries):
        key = " ".join(word.strip().lower().split())
        if not key:
            raise ValueError(f"entry {i}: empty word")
        if any(is_classifier(t) for t in tokenize(gloss)):
            rejected.append((word, gloss))
            continue
        try:
            g = normalize_gloss(gloss)
        except GlossError as exc:
            raise MalformedToken(f"entry {i} ({word!r}, {gloss!r}): {exc}",
                                 getattr(exc, "token", gloss), index=i) from exc
        variants = table.setdefault(key, [])
        if g not in variants:
            variants.append(g)
    if rejected:
        log.warning("lexicon: rejected %d classifier entries", len(rejected))
    return Lexicon(MappingProxyType({k: tuple(v) for k, v in table.items()}),
                   rejected=tuple(rejected))


def lookup(lex: Lexicon, word: str) -> list[str]:
    key = " ".join(word.strip().lower().split())
    if not key:
        raise ValueError("empty word")
    hit = lex.word_to_glosses.get(key)
    if hit:
        return list(hit)
    return [fingerspell(key)]


def read_lexicon_tsv(path: str | Path) -> list[tuple[str, str]]:
    entries = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.rstrip("\n")
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            if "\t" not in line:
                raise ValueError(f"{path}:{lineno}: expected word<TAB>gloss")
            word, gloss = line.split("\t", 1)
            entries.append((word, gloss.strip()))
    return entries


def load_lexicon(path: str | Path) -> Lexicon:
    return build_lexicon(read_lexicon_tsv(path))


def write_lexicon_tsv(lex: Lexicon, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for word, glosses in lex.word_to_glosses.items():
            for g in glosses:
                fh.write(f"{word}\t{g}\n")
