"""Few-shot prompt plans, gloss translation, flag classification and vocabulary enforcement."""
from __future__ import annotations

import logging
import math
import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Sequence

from ..gloss import (
    QUESTION_MARKER, GlossError, GlossSentence, GlossToken, Kind, Lexicon, fingerspell_token,
    normalize_token, parse_token, render_token,
)
from .corpus import TranslationExample
from .flags import LinguisticFlags, parse_label
from .providers import Conversation, EmptyCompletion, ProviderClient

log = logging.getLogger(__name__)

ROLE_PREAMBLE = (
    "You are an ASL translator. Your task is to translate an English sentence "
    "into ASL gloss format."
)
GRAMMAR_CLAUSE = "First, familiarize yourself with the following ASL grammar rules:"
VOCAB_CLAUSE = "Use the following vocabulary of allowed glosses:"
BATCH_HEADER = "Examples of English sentences with their ASL glosses:"
QUERY_TEMPLATE = "Translate the following English sentence to ASL gloss: {sentence}"
LIMIT_CLAUSE = (
    "When generating ASL glosses, restrict your usage to the provided vocabulary. "
    "Do not use any gloss outside of this list."
)
QUERY_TAIL = "Reply with the glosses only."

FLAGS_PROMPT = (
    "For the sentence below, answer four questions: 1) is it a yes/no question, "
    "2) is it a wh- question, 3) does it contain a condition, 4) does it contain negation. "
    "Answer each with 1 for yes or 0 for no, separated by commas, for example 1,1,0,0. "
    "Reply with the four labels only.\nSentence: {sentence}"
)


class ConfigError(ValueError):
    pass


def default_grammar_rules() -> str:
    return resources.files("aslgen.data").joinpath("grammar_rules.txt").read_text(encoding="utf-8")


@dataclass(frozen=True)
class PromptConfig:
    batch_size: int = 300
    limit_vocab: bool = True
    grammar_rules: bool = True
    grammar_rules_path: str | None = None
    n_examples: int | None = None

    def rules_text(self) -> str | None:
        if not self.grammar_rules:
            return None
        if self.grammar_rules_path:
            return Path(self.grammar_rules_path).read_text(encoding="utf-8")
        return default_grammar_rules()


@dataclass(frozen=True)
class PromptPlan:
    system_preamble: str
    batches: tuple[tuple[TranslationExample, ...], ...]
    final_query: str
    grammar_rules: str | None = None
    vocabulary: tuple[str, ...] = ()
    sentence: str = ""

    def conversation(self) -> list[dict[str, str]]:
        """Preamble, one user turn per example batch, then the query."""
        msgs = [{"role": "system", "content": self.system_preamble}]
        for batch in self.batches:
            lines = [BATCH_HEADER]
            for ex in batch:
                lines.append(f"English: {ex.english}\nGloss: {ex.gloss}")
            msgs.append({"role": "user", "content": "\n".join(lines)})
        msgs.append({"role": "user", "content": self.final_query})
        return msgs


def plan_prompt(examples: Sequence[TranslationExample], sentence: str, cfg: PromptConfig,
                vocabulary: Sequence[str] = ()) -> PromptPlan:
    if not sentence or not sentence.strip():
        raise ValueError("sentence must be non-empty")
    if cfg.batch_size <= 0:
        raise ConfigError(f"batch size must be positive, got {cfg.batch_size}")
    examples = list(examples)
    if cfg.n_examples is not None:
        examples = examples[: cfg.n_examples]
    size = cfg.batch_size
    batches = tuple(tuple(examples[i * size:(i + 1) * size])
                    for i in range(math.ceil(len(examples) / size)))
    rules = cfg.rules_text()
    vocab = tuple(vocabulary) if cfg.limit_vocab else ()
    parts = [ROLE_PREAMBLE]
    if rules:
        parts.append(f"{GRAMMAR_CLAUSE}\n{rules.strip()}")
    if vocab:
        parts.append(f"{VOCAB_CLAUSE}\n{', '.join(vocab)}")
    query = [QUERY_TEMPLATE.format(sentence=sentence.strip())]
    if cfg.limit_vocab:
        query.append(LIMIT_CLAUSE)
    query.append(QUERY_TAIL)
    return PromptPlan("\n\n".join(parts), batches, "\n".join(query), rules, vocab, sentence.strip())


_PUNCT_ONLY = re.compile(r"^[^\w#\"]+$")


def parse_completion(text: str, source_english: str | None = None) -> GlossSentence:
    """Normalize a raw completion into a gloss sentence, dropping punctuation and broken tokens."""
    lines = [ln.strip() for ln in text.strip().splitlines() if ln.strip()]
    if not lines:
        raise EmptyCompletion("provider returned an empty completion")
    line = re.sub(r"^(?:ASL\s+)?gloss(?:es)?\s*:\s*", "", lines[0], flags=re.I)
    tokens = []
    for piece in line.split():
        piece = piece.strip(",;")
        if not piece or _PUNCT_ONLY.match(piece):
            continue
        piece = piece.rstrip(".!?,") or piece
        try:
            tokens.append(normalize_token(parse_token(piece)))
        except GlossError as exc:
            log.warning("dropping unparseable gloss %r: %s", piece, exc)
    if not tokens:
        raise EmptyCompletion(f"no gloss tokens in completion {text!r}")
    return GlossSentence(tuple(tokens), source_english)


def translate_sentence(client: ProviderClient, plan: PromptPlan) -> GlossSentence:
    return parse_completion(client.complete(plan.conversation()), plan.sentence or None)


def flags_conversation(sentence: str) -> list[dict[str, str]]:
    return [{"role": "user", "content": FLAGS_PROMPT.format(sentence=sentence.strip())}]


def classify_flags(client: ProviderClient, sentence: str) -> LinguisticFlags:
    if not sentence or not sentence.strip():
        raise ValueError("sentence must be non-empty")
    return parse_label(client.complete(flags_conversation(sentence)))


# -- vocabulary enforcement -----------------------------------------------


@dataclass(frozen=True)
class Substitution:
    position: int
    original: str
    replacement: tuple[str, ...]
    reason: str


@dataclass(frozen=True)
class Enforced:
    sentence: GlossSentence
    substitutions: tuple[Substitution, ...] = field(default=())


def realizable_glosses(lex: Lexicon) -> frozenset[str]:
    if lex.gloss_to_clips:
        return frozenset(lex.gloss_to_clips)
    return frozenset(lex.vocabulary)


def _spell(word: str) -> list[GlossToken]:
    try:
        return [fingerspell_token(word)]
    except ValueError:
        return []


def _realize(tok: GlossToken, vocab: frozenset[str]) -> tuple[list[GlossToken], str]:
    text = render_token(tok)
    if tok.kind is Kind.FINGERSPELLED or text in vocab:
        return [tok], ""
    if tok.kind is Kind.QUESTION_MARK:
        return [], "question marker not in vocabulary"
    out: list[GlossToken] = []
    if tok.question:
        bare, reason = _realize(parse_token(text[: -len(QUESTION_MARKER) - 1]), vocab)
        out = bare
        if QUESTION_MARKER in vocab:
            out = out + [parse_token(QUESTION_MARKER)]
        return out, reason or "question suffix split off"
    if tok.kind is Kind.COMPOUND:
        for p in tok.parts:
            out += _realize(p, vocab)[0]
        return out, "compound split into parts"
    if tok.kind in (Kind.NAME_SIGN, Kind.LOAN_SIGN):
        return _spell(tok.base), "fingerspelled"
    if tok.base in vocab:
        return [parse_token(tok.base)], "inflection dropped"
    return _spell(tok.base), "fingerspelled"


def enforce_vocabulary(g: GlossSentence, lex: Lexicon, source: str | None = None) -> Enforced:
    """Replace glosses without clips by realizable ones; fingerspelling is always realizable."""
    vocab = realizable_glosses(lex)
    tokens: list[GlossToken] = []
    subs = []
    for i, tok in enumerate(g.tokens):
        out, reason = _realize(tok, vocab)
        if reason:
            subs.append(Substitution(i, render_token(tok), tuple(render_token(t) for t in out), reason))
        tokens.extend(out)
    src = source if source is not None else g.source_english
    return Enforced(GlossSentence(tuple(tokens), src), tuple(subs))


def is_realizable(tok: GlossToken, lex: Lexicon) -> bool:
    return tok.kind is Kind.FINGERSPELLED or render_token(tok) in realizable_glosses(lex)
