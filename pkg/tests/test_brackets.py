from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from foliation_forge.brackets import (
    NotProportional,
    PoissonStructure,
    ProportionalByConstant,
    ProportionalByField,
    bracket,
    build_flaschka_ratiu,
    compare_conformal,
    conformal_rescale,
    hamiltonian_vector_field,
    is_casimir,
    jacobi_check,
    jacobiator,
    jacobiator_numeric,
)
from foliation_forge.chart import Chart
from foliation_forge.defaults import DEFAULT_SEED
from foliation_forge.errors import DegreeError, DimensionMismatchError, VanishingFactorError
from foliation_forge.models import fold_model, lefschetz_model
from foliation_forge.models.lefschetz import LEFSCHETZ_NAMES
from foliation_forge.multivector import (
    MultivectorField,
    differential,
    evaluate_on_covectors,
    rank_at,
    schouten_self_bracket,
)
from foliation_forge.polynomial import parse_polynomial
from foliation_forge.sampling import random_generator, random_polynomial, random_rational_point
from tests.strategies import bivectors, polynomials, rational_points

NAMES = ("x1", "x2", "x3", "x4")
CHART = Chart(NAMES)
FACTORS = ("1", "1 + x1^2")


def poly(text, names=NAMES):
    return parse_polynomial(text, names)


def test_builder_on_coordinate_casimirs(chart4):
    P = build_flaschka_ratiu(chart4, ["x1", "x2"])
    assert P.bivector == MultivectorField.basis(chart4, 2, 3)
    assert P.model_tag == "flaschka-ratiu"


def test_builder_needs_n_minus_two_casimirs(chart4, chart3):
    with pytest.raises(DimensionMismatchError):
        build_flaschka_ratiu(chart4, ["x1"])
    with pytest.raises(DimensionMismatchError):
        build_flaschka_ratiu(Chart(("a", "b")), [])
    assert build_flaschka_ratiu(chart3, ["x1"]).bivector == MultivectorField.basis(chart3, 1, 2)


@pytest.mark.parametrize("k", [0, "x1", "x1^2 - 1/4"])
def test_builder_rejects_vanishing_k(chart4, k):
    with pytest.raises(VanishingFactorError):
        build_flaschka_ratiu(chart4, ["x1", "x2"], k)


def test_builder_absorbs_the_orientation():
    flipped = Chart(NAMES, orientation=-2)
    P = build_flaschka_ratiu(flipped, ["x1", "x2"])
    assert P.bivector == MultivectorField(flipped, 2, {(2, 3): Fraction(-1, 2)})


def test_builder_recovers_the_lefschetz_model(lefschetz):
    built = build_flaschka_ratiu(lefschetz.chart, lefschetz.casimirs)
    assert built.bivector == lefschetz.bivector.scale(4)
    assert compare_conformal(built, lefschetz) == ProportionalByConstant(Fraction(4))


def test_builder_recovers_the_fold_model(fold):
    built = build_flaschka_ratiu(fold.chart, fold.casimirs)
    assert built.bivector == fold.bivector.scale(-2)
    assert compare_conformal(built, fold) == ProportionalByConstant(Fraction(-2))


def test_fold_brackets(fold):
    assert bracket(fold, "x1", "x2").polynomial == poly("-x3", fold.chart.names)
    assert bracket(fold, "x2", "x3").polynomial == poly("x1", fold.chart.names)
    assert bracket(fold, "x1", "x3").polynomial == poly("x2", fold.chart.names)
    assert bracket(fold, "theta", "x1^3 + theta*x2").polynomial.is_zero


def test_bracket_is_antisymmetric(lefschetz):
    g, h = "x1*y2 + x2", "y1^2 - x1"
    assert bracket(lefschetz, g, h).polynomial == -bracket(lefschetz, h, g).polynomial


def test_hamiltonian_vector_field_examples(fold, chart4):
    components = hamiltonian_vector_field(fold, "x3")
    names = fold.chart.names
    assert [c.polynomial for c in components] == [poly(t, names) for t in ("0", "x2", "x1", "0")]

    for F in fold.casimirs:
        assert all(c.polynomial.is_zero for c in hamiltonian_vector_field(fold, F))

    planar = PoissonStructure(chart4, MultivectorField.basis(chart4, 0, 1))
    components = hamiltonian_vector_field(planar, "x2")
    assert [c.polynomial for c in components] == [poly(t) for t in ("1", "0", "0", "0")]


def test_hamiltonian_field_is_tangent_to_the_level_sets(lefschetz):
    X = hamiltonian_vector_field(lefschetz, "x1*y2 - y1^3")
    for F in lefschetz.casimirs:
        derivative = sum(
            (F.derivative(index) * component for index, component in enumerate(X)),
            lefschetz.chart.scalar(0),
        )
        assert derivative.polynomial.is_zero


def test_casimir_examples(fold):
    assert is_casimir(fold, "-x1^2 + x2^2 + x3^2")
    assert is_casimir(fold, 5)
    result = is_casimir(fold, "x3")
    assert not result.passed and result.exact
    assert result.residual == "x2"
    assert result.detail["component"] == "x1"


def test_smooth_casimir_check(fold):
    F = fold.chart.scalar("-x1^2 + x2^2 + x3^2").as_smooth()
    result = is_casimir(fold, F, samples=100)
    assert result.passed and not result.exact


def test_conformal_rescale_keeps_jacobi(fold):
    rescaled = conformal_rescale(fold, "1 + x1^2")
    assert schouten_self_bracket(rescaled.bivector).is_zero
    assert rescaled.k.polynomial == poly("1 + x1^2", fold.chart.names)
    assert [F.polynomial for F in rescaled.casimirs] == [F.polynomial for F in fold.casimirs]


def test_conformal_rescale_by_one(lefschetz):
    assert conformal_rescale(lefschetz, 1).bivector == lefschetz.bivector


def test_conformal_rescale_by_two_keeps_rank(lefschetz, rng):
    doubled = conformal_rescale(lefschetz, 2)
    assert doubled.bivector == lefschetz.bivector.scale(2)
    for _ in range(100):
        point = random_rational_point(rng, 4)
        assert rank_at(doubled.bivector, point) == rank_at(lefschetz.bivector, point)


def test_conformal_rescale_rejects_vanishing_factor(fold):
    with pytest.raises(VanishingFactorError):
        conformal_rescale(fold, "x2")


def test_compare_conformal_constant(lefschetz):
    assert compare_conformal(lefschetz.bivector.scale(4), lefschetz.bivector) == (
        ProportionalByConstant(Fraction(4))
    )


def test_compare_conformal_field(fold):
    verdict = compare_conformal(fold.bivector.scale("1 + x1^2"), fold.bivector)
    assert isinstance(verdict, ProportionalByField)
    assert verdict.field.polynomial == poly("1 + x1^2", fold.chart.names)


def test_compare_conformal_not_proportional(chart4, fold, lefschetz):
    a = MultivectorField(chart4, 2, {(0, 1): "x1"})
    b = MultivectorField(chart4, 2, {(0, 1): "x2"})
    assert isinstance(compare_conformal(a, b), NotProportional)
    swapped = MultivectorField(chart4, 2, {(0, 1): 1, (2, 3): 2})
    assert isinstance(compare_conformal(swapped, MultivectorField.basis(chart4, 0, 1)), NotProportional)


def test_compare_conformal_sampled(lefschetz):
    smooth = MultivectorField(
        lefschetz.chart,
        2,
        {key: field.as_smooth() for key, field in lefschetz.bivector.coefficients.items()},
    )
    verdict = compare_conformal(smooth.scale(2), smooth, samples=50)
    assert isinstance(verdict, ProportionalByConstant)
    assert verdict.ratio == pytest.approx(2.0)


def test_jacobi_check_reports_the_failing_component(chart3):
    P = PoissonStructure(chart3, MultivectorField(chart3, 2, {(0, 1): "x2", (0, 2): "x1"}))
    result = jacobi_check(P)
    assert not result.passed and result.exact
    assert result.residual == "2*x2"
    assert result.detail["component"] == "x1^x2^x3"


@pytest.mark.parametrize("k", ["1", "2", "1 + x1^2"])
def test_models_satisfy_jacobi(k):
    assert jacobi_check(lefschetz_model(k))
    assert jacobi_check(fold_model(k))


def test_numeric_jacobi_agrees(fold, chart3):
    smooth = PoissonStructure(
        fold.chart,
        MultivectorField(
            fold.chart,
            2,
            {key: field.as_smooth() for key, field in fold.bivector.coefficients.items()},
        ),
    )
    result = jacobi_check(smooth, samples=200)
    assert result.passed and not result.exact

    broken = MultivectorField(chart3, 2, {(0, 1): "x2", (0, 2): "x1"})
    smooth_broken = PoissonStructure(
        chart3,
        MultivectorField(
            chart3, 2, {key: field.as_smooth() for key, field in broken.coefficients.items()}
        ),
    )
    assert not jacobi_check(smooth_broken, samples=50)


def test_structure_requires_a_bivector(chart4):
    with pytest.raises(DegreeError):
        PoissonStructure(chart4, MultivectorField.basis(chart4, 0))


@settings(max_examples=100)
@given(
    polynomials(NAMES, max_degree=3, max_terms=4),
    polynomials(NAMES, max_degree=3, max_terms=4),
    st.sampled_from(FACTORS),
    st.lists(rational_points(4, bound=1), min_size=5, max_size=5),
)
def test_random_casimir_pairs_give_poisson_structures(F1, F2, k, points):
    P = build_flaschka_ratiu(CHART, [F1, F2], k)
    assert schouten_self_bracket(P.bivector).is_zero
    assert all(is_casimir(P, F) for F in P.casimirs)
    assert all(rank_at(P.bivector, point) <= 2 for point in points)
    rescaled = conformal_rescale(P, "1 + x1^2")
    assert schouten_self_bracket(rescaled.bivector).is_zero


@pytest.mark.slow
@pytest.mark.parametrize("case", range(10))
def test_built_structures_have_rank_at_most_two_on_a_dense_sample(case):
    rng = random_generator(DEFAULT_SEED, 100 + case)
    casimirs = [random_polynomial(rng, NAMES) for _ in range(2)]
    P = build_flaschka_ratiu(CHART, casimirs, FACTORS[case % 2])
    ranks = {rank_at(P.bivector, point) for point in CHART.sample(rng, 10_000)}
    assert ranks <= {0, 2}


@settings(max_examples=100)
@given(
    polynomials(LEFSCHETZ_NAMES, max_degree=2, max_terms=3),
    polynomials(LEFSCHETZ_NAMES, max_degree=2, max_terms=3),
    polynomials(LEFSCHETZ_NAMES, max_degree=2, max_terms=3),
)
def test_leibniz_rule(g, h, w):
    P = lefschetz_model()
    lhs = bracket(P, g * h, w)
    rhs = bracket(P, h, w) * g + bracket(P, g, w) * h
    assert lhs.polynomial == rhs.polynomial


@settings(max_examples=100)
@given(
    bivectors(Chart(NAMES)),
    polynomials(NAMES, max_degree=2, max_terms=3),
    polynomials(NAMES, max_degree=2, max_terms=3),
    polynomials(NAMES, max_degree=2, max_terms=3),
    st.lists(rational_points(4), min_size=10, max_size=10),
)
def test_schouten_convention_matches_the_jacobiator(pi, f, g, h, points):
    P = PoissonStructure(pi.chart, pi)
    trivector = schouten_self_bracket(pi)
    covectors = [differential(pi.chart, u) for u in (f, g, h)]
    jac = jacobiator(P, f, g, h)
    for point in points:
        assert evaluate_on_covectors(trivector, covectors, point) == 2 * jac(point)


def test_smooth_jacobiator_agrees_with_exact(rng):
    coefficients = {(0, 1): "x3^2", (0, 2): "x1*x4", (1, 3): "x2 - x3"}
    exact_P = PoissonStructure(CHART, MultivectorField(CHART, 2, coefficients))
    smooth_P = PoissonStructure(
        CHART,
        MultivectorField(
            CHART, 2, {key: CHART.scalar(text).as_smooth() for key, text in coefficients.items()}
        ),
    )
    assert not smooth_P.is_exact
    f, g, h = "x1 + x2*x3", "x4^2", "x1*x2 - x3"
    exact = jacobiator(exact_P, f, g, h)
    assert exact.is_exact
    for point in CHART.sample(rng, 1000):
        expected = float(exact(point, exact=False))
        assert jacobiator_numeric(smooth_P, f, g, h, point) == pytest.approx(
            expected, rel=1e-9, abs=1e-9
        )
