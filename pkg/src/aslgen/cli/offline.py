"""Provider-free translation fallback: greedy longest-phrase lexicon lookup."""
from __future__ import annotations

import re

from ..gloss import GlossSentence, Lexicon, fingerspell_token, parse_gloss

# function words with no sign of their own; dropped when the lexicon has no entry for them
DROP = frozenset({
    "a", "an", "the", "is", "are", "am", "was", "were", "be", "been", "do", "does", "did",
    "to", "at", "of", "by", "on", "in", "for", "with", "will", "shall",
})

WORD_RE = re.compile(r"[a-z0-9']+")


def offline_translate(sentence: str, lex: Lexicon) -> GlossSentence:
    words = WORD_RE.findall(sentence.lower())
    if not words:
        raise ValueError("sentence has no words")
    longest = lex.max_phrase_len()
    tokens = []
    i = 0
    while i < len(words):
        for n in range(min(longest, len(words) - i), 0, -1):
            key = " ".join(words[i:i + n])
            if key in lex.word_to_glosses:
                tokens.extend(parse_gloss(lex.word_to_glosses[key][0]).tokens)
                i += n
                break
        else:
            w = words[i].replace("'", "")
            if words[i] not in DROP and w:
                try:
                    tokens.append(fingerspell_token(w))
                except ValueError:
                    pass
            i += 1
    if not tokens:
        raise ValueError(f"no glosses produced for {sentence!r}")
    return GlossSentence(tuple(tokens), sentence)
