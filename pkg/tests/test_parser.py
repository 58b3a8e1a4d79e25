import random

import pytest
from hypothesis import given, strategies as st

from rsdl.core import Arrow, Structure, Theory, Variant, lit
from rsdl.parser import ParseError, parse_cnf, parse_theory, render_theory, tokenize

from gen import random_theory

EXAMPLE_1 = "facts: alpha.\nr0: alpha => beta.\nr1: beta => phi.\nr2: beta -> psi."


def test_example_one_parses():
    t = parse_theory(EXAMPLE_1)
    assert t.facts == (lit("alpha"),)
    assert [r.label for r in t.rules] == ["r0", "r1", "r2"]
    assert t.rule("r2").arrow is Arrow.STRICT
    assert t.variant is Variant.MS_SINGLE
    assert t.superiority == frozenset()


def test_empty_theory():
    assert parse_theory("facts: .\n") == Theory()
    assert parse_theory("") == Theory()


def test_mixed_separators_points_at_the_comma():
    with pytest.raises(ParseError) as err:
        parse_theory("r0: a ; b , c => d.")
    assert err.value.message == "mixed separators"
    assert (err.value.span.line, err.value.span.column) == (1, 11)


def test_comments_crlf_negation_and_superiority():
    text = "# team\r\nfacts: a, a, ~b.  # two copies\r\nr0: a ~> ~c.\r\nr1: => c.\r\nsup: r1 > r0.\r\n"
    t = parse_theory(text)
    assert t.facts == (lit("a"), lit("a"), lit("~b"))
    assert t.rule("r0").arrow is Arrow.DEFEATER
    assert t.rule("r1").body.items == ()
    assert t.superiority == {("r1", "r0")}


@pytest.mark.parametrize("text, variant", [
    ("r0: a; b => c.", Variant.SEQ_SINGLE),
    ("r0: a; b => c; d.", Variant.SEQ_SEQ_HEAD),
    ("r0: a => c; d.", Variant.SEQ_SEQ_HEAD),
    ("r0: a, b => c.", Variant.MS_SINGLE),
    ("r0: a => c.", Variant.MS_SINGLE),
])
def test_variant_inference(text, variant):
    assert parse_theory(text).variant is variant


def test_multiset_heads_need_a_directive():
    with pytest.raises(ParseError, match="ambiguous variant"):
        parse_theory("r0: a; b => c, d.")
    t = parse_theory("variant: seq-ms-literal.\nr0: a => c, d.")
    assert t.rule("r0").head.structure is Structure.MULTISET
    assert t.rule("r0").body.structure is Structure.SEQUENCE


def test_single_items_adopt_the_variant_structure():
    t = parse_theory("variant: seq-seq.\nr0: a => c.")
    assert t.rule("r0").body.structure is Structure.SEQUENCE
    assert t.rule("r0").head.structure is Structure.SEQUENCE


@pytest.mark.parametrize("text, message", [
    ("r0: a => b.\nr0: b => c.", "duplicate label r0"),
    ("r0: a => b.\nsup: r9 > r0.", "unknown label r9"),
    ("r0: a => b.\nsup: r0 > r0.", "reflexive superiority"),
    ("r0: a => b", "expected '.'"),
    ("r0: a => .", "at least one head"),
    ("r0: a b => c.", "expected an arrow"),
    ("variant: nope.", "unknown variant"),
    ("r0: a => b, c.", "ambiguous variant"),
    ("r0: a, b => c; d.", "sequence heads need sequence bodies"),
    ("variant: ms-single.\nr0: a; b => c.", "sequence body"),
    ("facts: a$.", "unexpected character"),
    ("facts: sup.", "reserved word"),
])
def test_errors(text, message):
    with pytest.raises(ParseError, match=message.replace("(", r"\(")):
        parse_theory(text)


@given(st.integers(0, 100_000), st.sampled_from(list(Variant)))
def test_round_trip(seed, variant):
    t = random_theory(random.Random(seed), variant, acyclic=False)
    again = parse_theory(render_theory(t))
    assert again.same_as(t)


@given(st.text(alphabet="ab~;,.:=>-# \n\rr0", max_size=40))
def test_error_spans_lie_inside_the_input(text):
    try:
        parse_theory(text)
    except ParseError as err:
        lines = text.split("\n")
        assert 1 <= err.span.line <= len(lines)
        assert 1 <= err.span.column <= len(lines[err.span.line - 1]) + 1


def test_render_example_and_empty():
    text = render_theory(parse_theory(EXAMPLE_1))
    assert "r0: alpha => beta." in text and "r2: beta -> psi." in text
    assert render_theory(Theory()) == "variant: ms-single.\nfacts: .\n"


def test_tokens_keep_positions():
    toks = tokenize("r0:\n  ~a")
    assert [(t.kind, t.span.line, t.span.column) for t in toks[:3]] == [
        ("word", 1, 1), (":", 1, 3), ("~", 2, 3)]


def test_cnf():
    f = parse_cnf("a b c\n~a ~b d")
    assert len(f.clauses) == 2 and f.variables == {"a", "b", "c", "d"}
    assert f.clauses[1][0] == lit("~a")
    assert parse_cnf("a a a").clauses == ((lit("a"),) * 3,)
    with pytest.raises(ParseError, match="clause arity 2, expected 3"):
        parse_cnf("a b")
    with pytest.raises(ParseError, match="invalid literal"):
        parse_cnf("a b c!")
    assert parse_cnf("# nothing\n\n").clauses == ()
