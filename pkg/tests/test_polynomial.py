from fractions import Fraction

import pytest
from hypothesis import given

from foliation_forge.errors import (
    ChartMismatchError,
    DimensionMismatchError,
    PolynomialParseError,
)
from foliation_forge.models.lefschetz import LEFSCHETZ_CASIMIRS, LEFSCHETZ_NAMES
from foliation_forge.polynomial import (
    Polynomial,
    format_polynomial,
    parse_polynomial,
    poly_diff,
    poly_eval,
)
from tests.strategies import polynomials, rational_points

NAMES = ("x1", "x2", "x3", "x4")


def lefschetz_casimir(index):
    return parse_polynomial(LEFSCHETZ_CASIMIRS[index], LEFSCHETZ_NAMES)


def test_eval_lefschetz_casimirs():
    assert poly_eval(lefschetz_casimir(0), (1, 0, 0, 0)) == 1
    assert poly_eval(lefschetz_casimir(1), (1, 1, 0, 0)) == 2


def test_eval_zero_polynomial():
    assert poly_eval(Polynomial.zero(NAMES), (Fraction(1, 3), 2, -5, 7)) == 0


def test_eval_is_exact_at_rational_points():
    p = parse_polynomial("x1/3 + x2^2", NAMES)
    value = p.evaluate((Fraction(1, 2), Fraction(1, 2), 0, 0))
    assert isinstance(value, Fraction)
    assert value == Fraction(1, 6) + Fraction(1, 4)


def test_eval_float_point():
    p = parse_polynomial("x1*x2 - 1", NAMES)
    assert p.evaluate((0.5, 4.0, 0.0, 0.0)) == pytest.approx(1.0)


def test_eval_dimension_mismatch():
    with pytest.raises(DimensionMismatchError):
        poly_eval(lefschetz_casimir(0), (1, 0, 0))


def test_diff_examples():
    assert poly_diff(lefschetz_casimir(0), 0) == parse_polynomial("2*x1", LEFSCHETZ_NAMES)
    assert poly_diff(lefschetz_casimir(1), 2) == parse_polynomial("2*y2", LEFSCHETZ_NAMES)
    theta = parse_polynomial("theta", ("theta", "x1", "x2", "x3"))
    assert poly_diff(theta, 0) == 1


def test_diff_of_constant_is_zero():
    assert poly_diff(Polynomial.constant(NAMES, 7), 1).is_zero


def test_diff_index_out_of_range():
    with pytest.raises(IndexError):
        poly_diff(lefschetz_casimir(0), 4)


def test_chart_names_win_over_index_aliases():
    # on the Lefschetz chart "x1" is coordinate 0, while the alias x1 would be coordinate 1
    p = parse_polynomial("x1", LEFSCHETZ_NAMES)
    assert p == Polynomial.variable(LEFSCHETZ_NAMES, 0)
    q = parse_polynomial("x0 + x3", ("theta", "a", "b", "c"))
    assert q == parse_polynomial("theta + c", ("theta", "a", "b", "c"))


@pytest.mark.parametrize(
    "text, expected",
    [
        ("-x1^2 + x2^2 + x3^2", "-x1^2 + x2^2 + x3^2"),
        ("x3^2 + x2^2 - x1^2", "-x1^2 + x2^2 + x3^2"),
        ("1/2*x1 - 3", "1/2*x1 - 3"),
        ("(x1 + x2)^2", "x1^2 + 2*x1*x2 + x2^2"),
        ("x1 - x1", "0"),
        ("0.25*x2", "1/4*x2"),
    ],
)
def test_format_is_canonical(text, expected):
    assert format_polynomial(parse_polynomial(text, ("x1", "x2", "x3"))) == expected


@pytest.mark.parametrize("text", ["x1 +* x2", "sin(x1)", "x1 + z", "x1^(1/2)"])
def test_parse_errors(text):
    with pytest.raises(PolynomialParseError):
        parse_polynomial(text, ("x1", "x2", "x3"))


def test_polynomials_from_different_rings_do_not_mix():
    with pytest.raises(ChartMismatchError):
        Polynomial.variable(("a", "b"), 0) + Polynomial.variable(("c", "d"), 0)
    with pytest.raises(DimensionMismatchError):
        Polynomial.variable(("a", "b"), 0) + Polynomial.variable(("a", "b", "c"), 0)


def test_from_terms_rejects_bad_exponents():
    with pytest.raises(DimensionMismatchError):
        Polynomial.from_terms(NAMES, {(1, 0): 1})
    with pytest.raises(DimensionMismatchError):
        Polynomial.from_terms(NAMES, {(1, 0, -1, 0): 1})


def test_reflect():
    p = parse_polynomial("x1 + x2^2 + x1*x3", ("x1", "x2", "x3"))
    assert p.reflect([0]) == parse_polynomial("-x1 + x2^2 - x1*x3", ("x1", "x2", "x3"))


def test_embed():
    p = parse_polynomial("x1*x3", ("x1", "x2", "x3"))
    lifted = p.embed(("t", "x1", "x2", "x3"), (1, 2, 3))
    assert lifted == parse_polynomial("x1*x3", ("t", "x1", "x2", "x3"))


def test_divide():
    p = parse_polynomial("x1^2*x2 + x2", NAMES)
    quotient, remainder = p.divide(parse_polynomial("x2", NAMES))
    assert quotient == parse_polynomial("x1^2 + 1", NAMES)
    assert remainder.is_zero


def test_degree():
    assert Polynomial.zero(NAMES).degree == -1
    assert parse_polynomial("x1^2*x2 + 3", NAMES).degree == 3
    assert parse_polynomial("x1^2*x2 + 3", NAMES).degree_in(0) == 2


@given(polynomials(NAMES), polynomials(NAMES), polynomials(NAMES))
def test_distributive(p, q, r):
    assert (p + q) * r == p * r + q * r


@given(polynomials(NAMES), polynomials(NAMES))
def test_leibniz(p, q):
    for index in range(len(NAMES)):
        assert (p * q).diff(index) == p.diff(index) * q + p * q.diff(index)


@given(polynomials(NAMES))
def test_difference_with_itself_is_empty(p):
    assert (p - p).terms == {}
    assert not (p - p)


@given(polynomials(NAMES))
def test_text_form_reparses(p):
    assert parse_polynomial(str(p), NAMES) == p


@given(polynomials(NAMES), polynomials(NAMES), rational_points(4))
def test_evaluation_is_a_ring_map(p, q, point):
    assert (p * q).evaluate(point) == p.evaluate(point) * q.evaluate(point)
    assert (p - q).evaluate(point) == p.evaluate(point) - q.evaluate(point)
