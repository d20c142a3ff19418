import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from support import FIXTURES, FormulaGen, fuzz_problem
from tptp_ntf.errors import LexError, ParseError, TypingError, UnsupportedDialectError
from tptp_ntf.syntax import (
    ast as A, census, check_types, load_problem, parse_formula, parse_problem, print_formula,
    print_problem, resolve_defaults, tokenize,
)
from tptp_ntf.syntax.printer import print_type
from tptp_ntf.syntax.lexer import reconstruct

RELAXED = {"cantor.p", "cantor_derivation.s", "leo_workers_proof.s"}
FIXTURE_FILES = sorted(p.name for p in FIXTURES.iterdir())


def load(name):
    return load_problem(FIXTURES / name, relaxed=name in RELAXED)


# -- lexer -----------------------------------------------------------------------

@given(st.text(alphabet="abXY_1 \n\t()[]{},.:-=<>~&|!?$#@'*+^", max_size=60))
@settings(max_examples=300, deadline=None)
def test_lexer_is_lossless(text):
    try:
        tokens = tokenize(text)
    except LexError:
        return
    assert reconstruct(text, tokens) == text


def test_lexer_longest_match():
    kinds = [t.lexeme for t in tokenize("a <=> b <~> c => [.] <.> d != e")]
    assert kinds == ["a", "<=>", "b", "<~>", "c", "=>", "[.]", "<.>", "d", "!=", "e"]


def test_lexer_reports_position():
    with pytest.raises(LexError) as info:
        tokenize("p(a) & \n 'unterminated")
    assert info.value.line == 2


# -- parsing and printing ------------------------------------------------------

@pytest.mark.parametrize("name", FIXTURE_FILES)
def test_fixture_round_trip(name):
    p = load(name)
    assert p.statements
    again = parse_problem(print_problem(p), relaxed=name in RELAXED)
    assert again == p


def test_thf_needs_relaxed_mode():
    with pytest.raises(UnsupportedDialectError):
        load_problem(FIXTURES / "cantor_derivation.s")


def test_sugar_means_generic_connectives():
    assert parse_formula("[.] p") == parse_formula("{$box} @ (p)")
    assert parse_formula("<.> p") == parse_formula("{$dia} @ (p)")


def test_connective_parameters_and_index():
    phi = parse_formula("{$knows(#a,$k:=q)} @ (p(X))")
    assert isinstance(phi, A.NonClassicalApp)
    assert phi.connective.index == "#a"
    assert [k for k, _ in phi.connective.params] == ["$k"]


def test_birds_fixture_census_and_warning():
    p = load("birds_defaults.p")
    stats = census(p)
    assert (stats.nonclassical_plain, stats.nonclassical_indexed) == (2, 1)
    assert p.warnings


def test_parse_error_lists_expectations():
    with pytest.raises(ParseError) as info:
        parse_problem("tff(a,axiom, p & ).")
    assert info.value.line == 1


def test_unknown_role_rejected():
    with pytest.raises(ParseError):
        parse_problem("tff(a,theorem_like, p ).")


def test_fuzzed_round_trip():
    rng = random.Random(20261018)
    for _ in range(200):
        p = parse_problem(fuzz_problem(rng))
        assert parse_problem(print_problem(p)) == p


def test_printer_is_idempotent():
    rng = random.Random(7)
    gen = FormulaGen(rng, (None, "#1"))
    for _ in range(200):
        text = print_formula(parse_formula(gen.formula(4)))
        assert print_formula(parse_formula(text)) == text


# -- typing and census ---------------------------------------------------------

def test_leo_workers_types_clean():
    tp = resolve_defaults(load("leo_workers.p"))
    assert check_types(tp) == []
    assert tp.user_types == {"person", "product"}


def test_defaults_for_undeclared_symbols():
    tp = resolve_defaults(parse_problem("tff(a,axiom, ! [X] : p(f(X), c) )."))
    assert print_type(tp.type_of("p")) == "( $i * $i ) > $o"
    assert tp.defaulted == {"p", "f", "c"}
    assert check_types(tp) == []
    # The inserted declarations make the defaults explicit.
    again = resolve_defaults(tp.as_problem())
    assert again.defaulted == frozenset()


def test_inconsistent_arity_is_an_error():
    with pytest.raises(TypingError):
        resolve_defaults(parse_problem("tff(a,axiom, p(a) & p(a,b) )."))


def test_type_mismatch_reported():
    text = ("tff(t,type, person: $tType ). tff(d,type, alex: person ). "
            "tff(pd,type, p: $i > $o ). tff(a,axiom, p(alex) ).")
    issues = check_types(resolve_defaults(parse_problem(text)))
    assert len(issues) == 1 and issues[0].statement == "a"


def test_census_leo_workers():
    stats = census(load("leo_workers.p"))
    assert "nonclassical: 4 {.}; 0 {#}" in stats.lines()
    assert stats.roles["hypothesis"] == 2
