import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hypbilliard.errors import AlphabetMismatch, CodeSyntaxError, PointOutOfRange
from hypbilliard.symcode import (
    EventuallyPeriodicCode,
    Word,
    forbidden_words,
    in_X,
    in_X_tilde,
    orbit_equal,
    parse,
    same_sequence,
    sequence_metric,
    shift,
    validate_code,
    validate_word,
)


def _has_forbidden_factor(symbols, forbidden):
    s = tuple(symbols)
    return any(s[i : i + len(f)] == f for f in forbidden for i in range(len(s) - len(f) + 1))


def test_parse_word_and_code():
    w = parse("1 2 . 3 4")
    assert w == Word((1, 2, 3, 4), 2) and w.at(0) == 3 and w.at(-2) == 1
    assert parse("3 1 2").point == 0
    c = parse("(3 4)* 1 . 2 (1 4)*")
    assert isinstance(c, EventuallyPeriodicCode)
    assert [c.at(n) for n in range(-4, 5)] == [4, 3, 4, 1, 2, 1, 4, 1, 4]
    assert str(parse(str(c))) == str(c)


@pytest.mark.parametrize("bad", ["1 . 2 . 3", "(1 2 3", "1 2)*", "(1 . 2)* 3 (1)*", "1 x 2", "(1)* (2)* 3 (4)*"])
def test_parse_errors(bad):
    with pytest.raises(CodeSyntaxError):
        parse(bad)


def test_word_positions():
    w = Word((1, 2, 3), 1)
    assert list(w.positions) == [-1, 0, 1]
    with pytest.raises(PointOutOfRange):
        w.at(2)
    with pytest.raises(PointOutOfRange):
        Word((1, 2), 3)


def test_rule_a(tetra):
    v = validate_word(parse("1 1"), tetra)
    assert v.rule == "A"
    assert validate_word(parse("1 2 3 4 3 2"), tetra) is None


def test_rule_b_lambda_three(tetra):
    assert validate_word(parse("1 2 1 2 1 2 1 2"), tetra).rule == "B"
    # (12)^3 inside a valid context, and an odd alternation of length 7
    assert validate_word(parse("3 1 2 1 2 1 2 4"), tetra) is None
    assert validate_word(parse("1 2 1 2 1 2 1"), tetra) is None
    assert validate_word(parse("2 1 2 1 2 1 2 1"), tetra).rule == "B"


def test_rule_b_octahedron(octa):
    # faces 1 and 2 share an edge, lambda = 2
    assert octa.adjacent(1, 2)
    assert validate_word(parse("1 2 1 2 1 2"), octa).rule == "B"
    assert validate_word(parse("1 2 1 2 1"), octa) is None
    # faces 1 and 8 are not adjacent: alternation is free
    assert validate_word(parse("1 8 1 8 1 8 1 8"), octa) is None


def test_rule_c(tetra):
    c = parse("(1 2 3)* . (1 2 3)*")
    v = validate_code(c, tetra)
    assert v.rule == "C"
    assert in_X_tilde(c, tetra) and not in_X(c, tetra)
    assert in_X(parse("(1 2 3 4)* . (1 2 3 4)*"), tetra)


def test_alphabet(tetra):
    with pytest.raises(AlphabetMismatch):
        validate_word(parse("1 5"), tetra)
    with pytest.raises(AlphabetMismatch):
        validate_code(EventuallyPeriodicCode((1, 2), Word((), 0), (3, 4), k=5), tetra)


def test_forbidden_words_count(tetra, octa):
    fw = forbidden_words(tetra)
    assert len(fw) == 4 + 12
    assert len(forbidden_words(octa)) == 8 + 24


@pytest.mark.parametrize("length", [2, 5, 8])
def test_rules_match_forbidden_factors_brute_force(tetra, length):
    fw = forbidden_words(tetra)
    for symbols in itertools.product((1, 2, 3, 4), repeat=length):
        by_rules = validate_word(Word(symbols), tetra) is None
        assert by_rules == (not _has_forbidden_factor(symbols, fw)), symbols


def test_periodic_code_rule_b_across_the_seam(tetra):
    # (1 2 1 2 1 2 1 2) only appears when the period is unrolled
    assert validate_code(parse("(1 2)* . 3 (1 2)*"), tetra).rule == "B"


codes = st.builds(
    lambda left, core, point, right: EventuallyPeriodicCode(left, Word(core, point % (len(core) + 1)), right),
    st.lists(st.integers(1, 4), min_size=1, max_size=3),
    st.lists(st.integers(1, 4), max_size=5),
    st.integers(0, 10),
    st.lists(st.integers(1, 4), min_size=1, max_size=3),
)


@settings(max_examples=100, deadline=None)
@given(codes, st.integers(-6, 6), st.integers(-6, 6))
def test_shift_is_an_action(c, s, t):
    a = shift(shift(c, s), t)
    b = shift(c, s + t)
    assert same_sequence(a, b)
    assert all(a.at(n) == c.at(n + s + t) for n in range(-20, 20))


@settings(max_examples=100, deadline=None)
@given(codes, codes)
def test_metric_properties(x, y):
    assert sequence_metric(x, x).value == 0.0
    assert sequence_metric(x, y).value == sequence_metric(y, x).value
    d = sequence_metric(x, y, horizon=40)
    if same_sequence(x, y):
        assert d.value == 0.0
    else:
        m = next(m for m in range(40) if x.at(m) != y.at(m) or x.at(-m) != y.at(-m))
        assert d.value == 2.0**-m


def test_metric_value_example():
    x = parse("(1 2)* . 3 4 1 2 (3 4)*")
    y = parse("(1 2)* . 3 4 1 3 (3 4)*")
    assert sequence_metric(x, y, horizon=16).value == 0.125
    w1, w2 = parse("1 2 . 3 4"), parse("1 2 . 3 4")
    d = sequence_metric(w1, w2)
    assert d.at_horizon and d.value == 2.0**-2


def test_same_sequence_different_presentation():
    a = parse("(1 2)* . 1 2 (1 2)*")
    b = parse("(1 2 1 2)* . (1 2)*")
    assert same_sequence(a, b)
    assert not same_sequence(a, shift(a, 1))


def test_orbit_equal():
    a = parse("(1 2 3)* 4 . 1 (2 3 4)*")
    assert orbit_equal(a, shift(a, 5))
    assert not orbit_equal(a, parse("(1 2 3)* 4 . 2 (2 3 4)*"))


def test_word_shift():
    w = shift(parse("1 2 . 3"), -1)
    assert w.at(0) == 2
