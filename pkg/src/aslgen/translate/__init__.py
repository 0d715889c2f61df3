"""English-to-gloss translation via a pluggable text-generation provider."""
from .corpus import TranslationExample, read_corpus_tsv, write_corpus_tsv
from .flags import LinguisticFlags, MalformedLabel, parse_label, rule_flags
from .prompt import (
    ConfigError, Enforced, PromptConfig, PromptPlan, Substitution, classify_flags,
    enforce_vocabulary, flags_conversation, parse_completion, plan_prompt, translate_sentence,
)
from .providers import (
    CachingProvider, EmptyCompletion, FixtureRecord, FixtureReplayer, HttpProvider, HttpSettings,
    MockProvider, ProviderClient, ProviderError, RateLimiter, RecordingProvider, conversation_hash,
    hashed_embedding,
)
from .rag import DimensionMismatch, anonymize, embed_corpus, retrieve_examples

__all__ = [name for name in dir() if not name.startswith("_")]
