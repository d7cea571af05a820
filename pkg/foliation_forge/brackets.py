"""Poisson structures built from Casimir data, and the brackets they define.

The central construction: on an oriented chart with orientation c * dx_0 ^ ... ^ dx_{n-1}, the
n-2 functions F_1, ..., F_{n-2} and a non-vanishing factor k define

    {g, h} c dx_0 ^ ... ^ dx_{n-1} = k dg ^ dh ^ dF_1 ^ ... ^ dF_{n-2},

a Poisson bracket of rank at most 2 whose Casimirs are the F_a.
"""
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Tuple

import numpy as np

from .checks import CheckResult
from .defaults import DEFAULT_SEED, JACOBI_TOLERANCE, SMOOTH_SAMPLE_POINTS
from .errors import ChartMismatchError, DegreeError, DimensionMismatchError, VanishingFactorError
from .multivector import (
    MultivectorField,
    differential,
    permutation_sign,
    schouten_self_bracket,
    wedge,
)
from .polynomial import format_rational
from .sampling import STREAM_JACOBI, random_generator
from .scalar import ScalarField, is_nonvanishing

LOGGER = logging.getLogger(__name__)

__all__ = [
    "CheckResult",
    "NotProportional",
    "PoissonStructure",
    "ProportionalByConstant",
    "ProportionalByField",
    "bracket",
    "build_flaschka_ratiu",
    "compare_conformal",
    "conformal_rescale",
    "hamiltonian_vector_field",
    "is_casimir",
    "jacobi_check",
    "jacobiator",
    "jacobiator_numeric",
    "require_nonvanishing",
]


@dataclass(frozen=True, eq=False)
class PoissonStructure:
    chart: object
    bivector: MultivectorField
    casimirs: Tuple[ScalarField, ...] = ()
    k: ScalarField = None
    model_tag: str = "custom"

    def __post_init__(self):
        if not isinstance(self.bivector, MultivectorField) or self.bivector.degree != 2:
            raise DegreeError("A Poisson structure needs a bivector field")
        if self.bivector.chart != self.chart:
            raise ChartMismatchError(
                f"Bivector on {self.bivector.chart.names}, structure on {self.chart.names}"
            )
        object.__setattr__(self, "casimirs", tuple(self.chart.scalar(F) for F in self.casimirs))
        object.__setattr__(self, "k", self.chart.scalar(1 if self.k is None else self.k))

    @property
    def dimension(self):
        return self.chart.dimension

    @property
    def is_exact(self):
        return self.bivector.is_exact

    def coefficient(self, i, j):
        """pi^ij as a ScalarField (antisymmetric in i, j)."""
        return self.bivector[(i, j)]

    def __repr__(self):
        return f"PoissonStructure({self.model_tag}, {self.chart!r})"


def require_nonvanishing(chart, field, name):
    """Raise VanishingFactorError unless ``field`` keeps one strict sign on the chart box."""
    if field.is_exact and field.polynomial.is_constant:
        if not field.polynomial.constant_term:
            raise VanishingFactorError(f"{name} is identically zero")
        return
    result = is_nonvanishing(field, chart.bounds, name=name)
    if not result:
        raise VanishingFactorError(f"{name} vanishes or changes sign near {result.witness}")


def build_flaschka_ratiu(chart, casimirs, k=1, model_tag="flaschka-ratiu"):
    """pi^ij = (k / c) * sign(i, j, L) * W_L, with L the increasing complement of {i, j} and
    W_L the dx^L coefficient of dF_1 ^ ... ^ dF_{n-2}."""
    n = chart.dimension
    if n < 3:
        raise DimensionMismatchError(f"The construction needs dimension >= 3, chart has {n}")
    casimirs = tuple(chart.scalar(F) for F in casimirs)
    if len(casimirs) != n - 2:
        raise DimensionMismatchError(
            f"Need exactly {n - 2} Casimirs on a {n}-dimensional chart, got {len(casimirs)}"
        )
    k = chart.scalar(k)
    require_nonvanishing(chart, k, "k")

    top = differential(chart, casimirs[0])
    for F in casimirs[1:]:
        top = wedge(top, differential(chart, F))

    orientation = chart.orientation_constant()
    factor = k * (1 / orientation) if orientation is not None else k / chart.orientation

    coefficients = {}
    for i in range(n):
        for j in range(i + 1, n):
            rest = tuple(index for index in range(n) if index not in (i, j))
            if rest not in top.coefficients:
                continue
            coefficients[(i, j)] = factor * top.coefficients[rest] * permutation_sign((i, j) + rest)
    LOGGER.debug(f"Built {model_tag} bivector with {len(coefficients)} nonzero coefficients")
    return PoissonStructure(
        chart, MultivectorField(chart, 2, coefficients), casimirs, k, model_tag
    )


def bracket(P, g, h):
    """{g, h} = sum over i<j of pi^ij (d_i g d_j h - d_j g d_i h)."""
    g = P.chart.scalar(g)
    h = P.chart.scalar(h)
    result = P.chart.scalar(0)
    for (i, j), coefficient in P.bivector.coefficients.items():
        result = result + coefficient * (
            g.derivative(i) * h.derivative(j) - g.derivative(j) * h.derivative(i)
        )
    return result


def hamiltonian_vector_field(P, h):
    """X_h with components X_h^i = {x_i, h} = sum_j pi^ij d_j h."""
    h = P.chart.scalar(h)
    components = [P.chart.scalar(0) for _ in range(P.dimension)]
    for (i, j), coefficient in P.bivector.coefficients.items():
        components[i] = components[i] + coefficient * h.derivative(j)
        components[j] = components[j] - coefficient * h.derivative(i)
    return tuple(components)


def _sample_points(chart, count, seed, stream):
    return chart.sample(random_generator(seed, stream), count)


def is_casimir(P, F, samples=SMOOTH_SAMPLE_POINTS, seed=DEFAULT_SEED, tolerance=JACOBI_TOLERANCE):
    """Whether the anchor of dF vanishes: exactly for Exact data, over samples otherwise."""
    F = P.chart.scalar(F)
    components = hamiltonian_vector_field(P, F)
    if all(component.is_exact for component in components):
        for name, component in zip(P.chart.names, components):
            if not component.polynomial.is_zero:
                return CheckResult(
                    name="casimir",
                    passed=False,
                    exact=True,
                    residual=str(component.polynomial),
                    detail={"component": name},
                )
        return CheckResult(name="casimir", passed=True, exact=True)

    worst, witness = 0.0, None
    for point in _sample_points(P.chart, samples, seed, STREAM_JACOBI):
        value = max(abs(float(component(point))) for component in components)
        if value > worst:
            worst, witness = value, point
    return CheckResult(
        name="casimir", passed=worst <= tolerance, exact=False, residual=worst, witness=witness
    )


def conformal_rescale(P, c):
    """The structure c * pi; same Casimirs, conformal factor k * c."""
    c = P.chart.scalar(c)
    require_nonvanishing(P.chart, c, "conformal factor")
    rescaled = PoissonStructure(
        P.chart, P.bivector.scale(c), P.casimirs, P.k * c, P.model_tag
    )
    if rescaled.is_exact:
        result = jacobi_check(rescaled)
        if not result:
            raise ValueError(
                f"Rescaled {P.model_tag} structure fails the Jacobi identity: {result.residual}"
            )
    return rescaled


@dataclass(frozen=True)
class ProportionalByConstant:
    ratio: object

    def __str__(self):
        ratio = format_rational(self.ratio) if isinstance(self.ratio, Fraction) else repr(self.ratio)
        return f"ProportionalByConstant({ratio})"


@dataclass(frozen=True)
class ProportionalByField:
    field: ScalarField

    def __str__(self):
        return f"ProportionalByField({self.field.polynomial if self.field.is_exact else 'smooth'})"


@dataclass(frozen=True)
class NotProportional:
    reason: str = ""

    def __str__(self):
        return "NotProportional"


def _compare_exact(a, b):
    a_polys = a.polynomials()
    b_polys = b.polynomials()
    if a_polys.keys() != b_polys.keys():
        return NotProportional("the two bivectors vanish on different coefficients")
    if not a_polys:
        return ProportionalByConstant(Fraction(1))

    keys = sorted(a_polys)
    pivot = keys[0]
    for key in keys[1:]:
        if a_polys[key] * b_polys[pivot] != a_polys[pivot] * b_polys[key]:
            return NotProportional(f"coefficient ratios differ on {pivot} and {key}")

    for key in keys:
        quotient, remainder = a_polys[key].divide(b_polys[key])
        if remainder.is_zero:
            break
    else:
        numerator, denominator = ScalarField.exact(a_polys[pivot]), ScalarField.exact(b_polys[pivot])
        bounds = a.chart.bounds
        if is_nonvanishing(numerator, bounds) and is_nonvanishing(denominator, bounds):
            return ProportionalByField(numerator / denominator)
        return NotProportional("the coefficient ratio is not a non-vanishing field")

    if quotient.is_constant:
        return ProportionalByConstant(quotient.constant_term)
    ratio = ScalarField.exact(quotient)
    if is_nonvanishing(ratio, a.chart.bounds):
        return ProportionalByField(ratio)
    return NotProportional("the coefficient ratio vanishes on the chart box")


def _compare_sampled(a, b, samples, seed, tolerance):
    ratios = []
    for point in _sample_points(a.chart, samples, seed, STREAM_JACOBI):
        a_values = a.values(point, exact=False)
        b_values = b.values(point, exact=False)
        for key in set(a_values) | set(b_values):
            numerator = float(a_values.get(key, 0.0))
            denominator = float(b_values.get(key, 0.0))
            if abs(denominator) > tolerance:
                ratios.append(numerator / denominator)
            elif abs(numerator) > tolerance:
                return NotProportional(f"only the first bivector is nonzero at {point}")
    if not ratios:
        return ProportionalByConstant(1.0)
    ratios = np.asarray(ratios)
    spread = float(np.max(np.abs(ratios - ratios[0])))
    if spread <= tolerance * max(1.0, abs(ratios[0])) and ratios[0]:
        return ProportionalByConstant(float(ratios[0]))
    shared = [key for key in a.coefficients if key in b.coefficients]
    if shared and ((ratios > 0).all() or (ratios < 0).all()):
        return ProportionalByField(a.coefficients[shared[0]] / b.coefficients[shared[0]])
    return NotProportional("sampled coefficient ratios change sign or vanish")


def compare_conformal(a, b, samples=SMOOTH_SAMPLE_POINTS, seed=DEFAULT_SEED, tolerance=JACOBI_TOLERANCE):
    """Decide whether a = r * b for a nonzero constant r or a non-vanishing field r."""
    if isinstance(a, PoissonStructure):
        a = a.bivector
    if isinstance(b, PoissonStructure):
        b = b.bivector
    if a.chart != b.chart:
        raise ChartMismatchError(f"Cannot compare bivectors on {a.chart.names} and {b.chart.names}")
    if a.is_exact and b.is_exact:
        verdict = _compare_exact(a, b)
    else:
        verdict = _compare_sampled(a, b, samples, seed, tolerance)
    LOGGER.debug(f"compare_conformal: {verdict}")
    return verdict


def jacobiator(P, f, g, h):
    """{f, {g, h}} + {g, {h, f}} + {h, {f, g}}."""
    return (
        bracket(P, f, bracket(P, g, h))
        + bracket(P, g, bracket(P, h, f))
        + bracket(P, h, bracket(P, f, g))
    )


def jacobiator_numeric(P, f, g, h, point):
    return float(jacobiator(P, f, g, h)(tuple(float(c) for c in point), exact=False))


def _coordinate_jacobiators(P, point):
    """The Jacobiator of each coordinate triple at ``point`` and the size of its terms."""
    n = P.dimension
    values = np.zeros((n, n))
    gradients = np.zeros((n, n, n))
    for (i, j), coefficient in P.bivector.coefficients.items():
        values[i, j] = float(coefficient(point, exact=False))
        values[j, i] = -values[i, j]
        gradient = np.asarray(coefficient.gradient(point, exact=False), dtype=float)
        gradients[i, j] = gradient
        gradients[j, i] = -gradient
    results = []
    for i in range(n):
        for j in range(i + 1, n):
            for k in range(j + 1, n):
                terms = np.concatenate(
                    [
                        values[i] * gradients[j, k],
                        values[j] * gradients[k, i],
                        values[k] * gradients[i, j],
                    ]
                )
                results.append(((i, j, k), float(terms.sum()), float(np.abs(terms).sum())))
    return results


def jacobi_check(P, samples=SMOOTH_SAMPLE_POINTS, seed=DEFAULT_SEED, tolerance=JACOBI_TOLERANCE):
    """The Jacobi identity: [pi, pi] = 0 exactly, or |Jacobiator| <= tolerance * local scale."""
    if P.is_exact:
        trivector = schouten_self_bracket(P.bivector)
        if trivector.is_zero:
            return CheckResult(name="jacobi", passed=True, exact=True)
        key, polynomial = sorted(trivector.polynomials().items())[0]
        return CheckResult(
            name="jacobi",
            passed=False,
            exact=True,
            residual=str(polynomial),
            detail={"component": "^".join(P.chart.names[i] for i in key)},
        )

    worst, witness = 0.0, None
    for point in _sample_points(P.chart, samples, seed, STREAM_JACOBI):
        for _, value, scale in _coordinate_jacobiators(P, point):
            relative = abs(value) / max(1.0, scale)
            if relative > worst:
                worst, witness = relative, point
    return CheckResult(
        name="jacobi", passed=worst <= tolerance, exact=False, residual=worst, witness=witness
    )
