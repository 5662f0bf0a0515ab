import math

import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from bdr.errors import DomainError, ParseError, UnknownIdentifier
from bdr.exprlang import (
    ONE, PI, S, T, ZERO, Binary, Const, add, const, differentiate, div, evaluate,
    free_variables, func, mul, neg, parse, pow_, simplify, sub, to_string,
)
from conftest import CORPUS, DATA


def test_parse_examples():
    assert parse("(sin(s)+s)/2") == div(add(func("sin", S), S), const(2))
    assert parse("-t/(2*sqrt(2))") == div(neg(T), mul(const(2), func("sqrt", const(2))))
    assert parse("  s ^ 2 ") == pow_(S, const(2))
    assert parse("pi") == PI
    assert parse("1.5e3*s") == mul(const(1500), S)


def test_precedence_and_associativity():
    assert parse("1-2-3") == sub(sub(const(1), const(2)), const(3))
    assert parse("1+2*3") == add(const(1), mul(const(2), const(3)))
    assert parse("-s^2") == pow_(neg(S), const(2))
    assert evaluate(parse("8/4/2")) == 1.0


@pytest.mark.parametrize("text, offset", [
    ("sin s", 4),
    ("2+", 2),
    ("(s", 2),
    ("s)", 1),
    ("", 0),
    ("s $ t", 2),
])
def test_parse_errors_carry_offset_and_expected(text, offset):
    with pytest.raises(ParseError) as info:
        parse(text)
    assert info.value.offset == offset
    assert info.value.expected


def test_missing_paren_after_function_expects_paren():
    with pytest.raises(ParseError) as info:
        parse("sin s")
    assert "(" in info.value.expected


def test_unknown_identifier():
    with pytest.raises(UnknownIdentifier) as info:
        parse("s + foo(t)")
    assert info.value.offset == 4
    with pytest.raises(UnknownIdentifier):
        parse("x")


def test_exponent_must_be_constant():
    with pytest.raises(ParseError):
        parse("2^s")
    assert evaluate(parse("s^(1/2)"), 4.0) == pytest.approx(2.0)


def test_evaluate_examples():
    assert evaluate(parse("s^2"), 3, 0) == 9
    assert evaluate(parse("cos(s)/sqrt(2)"), 0, 0) == pytest.approx(1 / math.sqrt(2), abs=1e-15)
    assert evaluate(parse("s*t"), 2, 3) == 6


@pytest.mark.parametrize("text, s", [("1/s", 0.0), ("log(s)", -1.0), ("log(s)", 0.0), ("sqrt(s)", -1.0)])
def test_domain_errors(text, s):
    with pytest.raises(DomainError):
        evaluate(parse(text), s, 0)


def test_evaluate_broadcasts_over_arrays():
    import numpy as np
    s = np.linspace(0, 1, 5)
    np.testing.assert_allclose(evaluate(parse("sin(s)+t"), s, 2.0), np.sin(s) + 2)


def test_free_variables():
    assert free_variables(parse("sin(s)*t + pi")) == {"s", "t"}
    assert free_variables(parse("2*pi")) == set()


def test_derivative_examples():
    assert differentiate(parse("(sin(s)+s)/2"), "s") == parse("(cos(s)+1)/2")
    assert differentiate(parse("sin(s)*t"), "t") == parse("sin(s)")
    assert differentiate(differentiate(parse("cos(s)"), "s"), "s") == parse("-cos(s)")
    assert differentiate(parse("t"), "s") == ZERO


def test_derivative_rejects_unknown_variable():
    with pytest.raises(ValueError):
        differentiate(S, "x")


def test_simplify_examples():
    x = func("sin", S)
    assert simplify(add(x, const(0))) == x
    assert simplify(mul(const(2), const(3))) == const(6)
    assert simplify(div(x, ONE)) == x
    assert simplify(neg(neg(x))) == x
    assert simplify(mul(ZERO, x)) == ZERO


# -- generated expressions ---------------------------------------------------

leaves = st.one_of(
    st.sampled_from([S, T, PI]),
    st.integers(0, 9).map(const),
    st.sampled_from([0.5, 1.25, 3.75]).map(const),
)


def _smooth(children):
    # total, smooth functions only, so finite differences are meaningful everywhere
    return st.one_of(
        st.builds(neg, children),
        st.builds(func, st.sampled_from(["sin", "cos"]), children),
        st.builds(Binary, st.sampled_from(["add", "sub", "mul"]), children, children),
        st.builds(lambda a, n: pow_(a, const(n)), children, st.integers(2, 3)),
    )


smooth_exprs = st.recursive(leaves, _smooth, max_leaves=8)


def _any(children):
    return st.one_of(
        _smooth(children),
        st.builds(func, st.sampled_from(["tan", "exp", "log", "sqrt"]), children),
        st.builds(div, children, children),
        st.builds(lambda a, b: pow_(a, b), children, st.one_of(leaves.filter(
            lambda e: not free_variables(e)), st.just(neg(const(2))))),
    )


any_exprs = st.recursive(leaves, _any, max_leaves=10)
points = st.tuples(st.floats(-2, 2), st.floats(-2, 2))


@given(any_exprs)
def test_print_then_parse_round_trips(e):
    assert parse(to_string(e)) == e


@pytest.mark.parametrize("name", CORPUS)
def test_parse_print_parse_on_corpus(name):
    import configparser
    cp = configparser.ConfigParser()
    cp.read_string((DATA / ("%s.bdr" % name)).read_text())
    for text in cp["surface"].values():
        e = parse(text)
        assert parse(to_string(e)) == e


def _ev(e, s, t):
    try:
        return evaluate(e, s, t)
    except (DomainError, OverflowError):
        assume(False)


@settings(max_examples=200)
@given(smooth_exprs, points, st.sampled_from("st"))
def test_derivative_matches_central_difference(e, p, var):
    s, t = p
    h = 1e-5
    ds, dt = (h, 0) if var == "s" else (0, h)
    fd = (_ev(e, s + ds, t + dt) - _ev(e, s - ds, t - dt)) / (2 * h)
    exact = _ev(differentiate(e, var), s, t)
    # central-difference noise is about eps*|f|/h; the bound is relative with that floor
    floor = 1e-10 * max(1.0, abs(_ev(e, s, t))) / h
    assert abs(exact - fd) <= 1e-6 * abs(exact) + floor


@given(any_exprs, points)
def test_mixed_partials_commute(e, p):
    st_ = differentiate(differentiate(e, "s"), "t")
    ts = differentiate(differentiate(e, "t"), "s")
    a, b = _ev(st_, *p), _ev(ts, *p)
    assume(math.isfinite(a) and math.isfinite(b) and max(abs(a), abs(b)) < 1e8)
    assert abs(a - b) <= 1e-10 * max(1.0, abs(a))


@settings(max_examples=50)
@given(any_exprs, st.randoms(use_true_random=False))
def test_simplify_preserves_values(e, rnd):
    simple = simplify(e)
    for _ in range(100):
        s, t = rnd.uniform(-2, 2), rnd.uniform(-2, 2)
        try:
            a = evaluate(e, s, t)
        except (DomainError, OverflowError):
            continue
        if not math.isfinite(a):
            continue
        b = evaluate(simple, s, t)
        assert abs(a - b) <= 1e-12 * max(1.0, abs(a))
