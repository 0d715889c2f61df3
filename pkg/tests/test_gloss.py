from __future__ import annotations

import logging

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from aslgen.gloss import (
    EmptyInput, Kind, MalformedToken, build_lexicon, load_lexicon, lookup, normalize_gloss,
    parse_gloss, parse_token, render_token, write_lexicon_tsv,
)

from _fixtures import CONVENTION_EXAMPLES


def test_fingerspelling_expands_letters():
    tok = parse_token("fs-J-O-H-N")
    assert tok.kind is Kind.FINGERSPELLED
    assert tok.letters == ("J", "O", "H", "N")
    assert parse_token("fs-JOHN").letters == ("J", "O", "H", "N")


def test_compound_parts():
    tok = parse_token("MOTHER+FATHER")
    assert tok.kind is Kind.COMPOUND
    assert [p.base for p in tok.parts] == ["MOTHER", "FATHER"]


def test_plain_token():
    tok = parse_token("GIVE")
    assert tok.kind is Kind.LEXICAL and tok.base == "GIVE" and tok.agreement is None


def test_agreement_verb():
    tok = parse_token("i:GIVE:j")
    assert tok.base == "GIVE"
    assert (tok.agreement.subject_locus, tok.agreement.object_locus) == ("i", "j")


def test_question_marker_kinds():
    assert parse_token("QMwg").kind is Kind.QUESTION_MARK
    tok = parse_token("fs-P-A-R-K-QMwg")
    assert tok.kind is Kind.FINGERSPELLED and tok.base == "PARK" and tok.question


def test_pronoun_fields():
    tok = parse_token("IX-3p-pl-2:x/y")
    assert (tok.base, tok.person, tok.plurality, tok.locus) == ("IX-3p", "3p", "pl-2", "x/y")
    assert parse_token("POSS-1p").person == "1p"
    assert parse_token("THUMB-IX-3p:i").base == "THUMB-IX-3p"


def test_aspect_suffix():
    tok = parse_token("STUDY-continuative")
    assert tok.base == "STUDY" and tok.aspect == "continuative"
    tok = parse_token("GIFT-distributive:i")
    assert tok.aspect == "distributive" and tok.locus == "i"


def test_quoted_adverbial_is_kept_verbatim():
    g = parse_gloss('IX-loc"under table" BOOK')
    assert len(g) == 2
    assert g.tokens[0].raw == 'IX-loc"under table"'
    assert g.tokens[0].base == "IX-loc"


def test_unknown_decoration_is_best_effort_lexical():
    tok = parse_token("WEIRD:THING:HERE")
    assert tok.kind is Kind.LEXICAL and tok.raw == "WEIRD:THING:HERE"


@pytest.mark.parametrize("bad", ["i:GIVE:", ":GIVE", "i::j", "i:GIVE:i", "i:GIVE:j:k"])
def test_malformed_agreement(bad):
    with pytest.raises(MalformedToken):
        parse_gloss(bad)


@pytest.mark.parametrize("blank", ["", "   ", "\n\t"])
def test_empty_input(blank):
    with pytest.raises(EmptyInput):
        parse_gloss(blank)


@pytest.mark.parametrize("src,expected", [
    ("i:GIVE:k", "i:GIVE:j"),
    ("fs-PARK", "fs-P-A-R-K"),
    ("GIVE", "GIVE"),
    ("GIVE++", "GIVE"),
    ("(2h)GIVE", "GIVE"),
    ("GIVE(1h)", "GIVE"),
    ("alt.GIVE+", "GIVE"),
    ("k:GIVE:m", "i:GIVE:j"),
    ("1p:GIVE:2p", "1p:GIVE:2p"),
    ("IX-3p:k", "IX-3p:j"),
    ("fs-john", "fs-J-O-H-N"),
    ("MOTHER+(2h)FATHER", "MOTHER+FATHER"),
])
def test_normalize_examples(src, expected):
    assert normalize_gloss(src) == expected


@pytest.mark.parametrize("gloss,kind", CONVENTION_EXAMPLES)
def test_convention_table_round_trip(gloss, kind):
    g = parse_gloss(gloss)
    assert g.tokens[0].kind.value == kind
    assert str(g) == gloss
    n = normalize_gloss(gloss)
    assert normalize_gloss(n) == n
    assert str(parse_gloss(n)) == n


# -- lexicon ---------------------------------------------------------------

def test_lookup_variants_and_fallback():
    lex = build_lexicon([("ask", "ASK"), ("ask", "ASK:i"), ("ask", "i:ASK:j"), ("give", "GIVE")])
    assert lookup(lex, "ask") == ["ASK", "ASK:i", "i:ASK:j"]
    assert lookup(lex, "give") == ["GIVE"]
    assert lookup(lex, "zyzzyva") == ["fs-Z-Y-Z-Z-Y-V-A"]
    assert lookup(lex, "Give") == ["GIVE"]


def test_build_merges_and_normalizes():
    lex = build_lexicon([("ask", "ASK"), ("ask", "ASK:i"), ("ask", "ASK+")])
    assert lex.word_to_glosses["ask"] == ("ASK", "ASK:i")
    assert build_lexicon([("john", "fs-JOHN")]).word_to_glosses["john"] == ("fs-J-O-H-N",)


def test_build_rejects_empty_and_reports_index():
    with pytest.raises(ValueError):
        build_lexicon([])
    with pytest.raises(MalformedToken) as exc:
        build_lexicon([("give", "GIVE"), ("bad", "i:GIVE:")])
    assert exc.value.index == 1


def test_classifiers_are_rejected(caplog):
    with caplog.at_level(logging.WARNING):
        lex = build_lexicon([("car", "CAR"), ("vehicle moves", "3-CL:vehicle-move"),
                             ("drive", "CL:3")])
    assert "vehicle moves" not in lex or lex.word_to_glosses.get("vehicle moves") is None
    assert ("drive", "CL:3") in lex.rejected
    assert "car" in lex


def test_lexicon_tsv_round_trip(tmp_path):
    src = tmp_path / "lex.tsv"
    src.write_text("# comment\nask\tASK\nask\tASK:i\n\njohn\tfs-JOHN\n", encoding="utf-8")
    lex = load_lexicon(src)
    out = tmp_path / "out.tsv"
    write_lexicon_tsv(lex, out)
    assert load_lexicon(out).word_to_glosses == lex.word_to_glosses
    assert lex.word_to_glosses["john"] == ("fs-J-O-H-N",)


# -- properties ------------------------------------------------------------

_upper = st.text(alphabet="ABCDEFGHIJKLMNOPQRSTUVWXYZ", min_size=1, max_size=6)
_locus = st.sampled_from(["i", "j", "k", "x", "1p", "2p", "3p"])


@st.composite
def gloss_tokens(draw):
    base = draw(_upper)
    form = draw(st.integers(0, 9))
    if form == 0:
        tok = "fs-" + base
    elif form == 1:
        tok = "fs-" + "-".join(base)
    elif form == 2:
        tok = base + "+" + draw(_upper)
    elif form == 3:
        a, b = draw(_locus), draw(_locus)
        tok = f"{a}:{base}:{b}" if a != b else base
    elif form == 4:
        tok = f"{base}-continuative"
    elif form == 5:
        tok = f"IX-{draw(st.sampled_from(['1p', '2p', '3p']))}:{draw(_locus)}"
    elif form == 6:
        tok = "#" + base
    elif form == 7:
        tok = "ns-" + base
    elif form == 8:
        tok = "QMwg"
    else:
        tok = base
    deco = draw(st.integers(0, 3))
    if deco == 1:
        tok = tok + "+"
    elif deco == 2:
        tok = "(2h)" + tok
    elif deco == 3:
        tok = "alt." + tok
    return tok


@settings(max_examples=300, deadline=None)
@given(st.lists(gloss_tokens(), min_size=1, max_size=6))
def test_normalize_is_idempotent(toks):
    s = " ".join(toks)
    n = normalize_gloss(s)
    assert normalize_gloss(n) == n


@settings(max_examples=300, deadline=None)
@given(st.lists(gloss_tokens(), min_size=1, max_size=6))
def test_canonical_tokens_round_trip(toks):
    n = normalize_gloss(" ".join(toks))
    assert " ".join(render_token(t) for t in parse_gloss(n).tokens) == n


@settings(max_examples=200, deadline=None)
@given(st.text(min_size=1, max_size=12).filter(lambda w: w.strip()))
def test_lookup_never_empty(word):
    lex = build_lexicon([("give", "GIVE")])
    try:
        out = lookup(lex, word)
    except ValueError:
        # nothing spellable (no ASCII letters or digits)
        assert not any(c.isascii() and c.isalnum() for c in word)
        return
    assert out
    for g in out:
        parse_gloss(g)
