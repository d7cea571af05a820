"""The indefinite fold: a neighbourhood S^1 x B^3 of a singular circle, fibred by
(theta, x) -> (theta, -x1^2 + x2^2 + x3^2).

When the normal bundle of the circle is non-orientable the neighbourhood is the quotient of
S^1 x B^3 by the free involution (theta, x1, x2, x3) -> (theta + pi, -x1, -x2, x3). The quotient
is never built as a chart of its own; checks run upstairs, and points are brought to the
fundamental domain theta in [0, pi) by ``quotient_representative``.
"""
import logging
import math
from fractions import Fraction

import numpy as np

from ..brackets import PoissonStructure, bracket, require_nonvanishing
from ..chart import TWO_PI, Chart, GridSpec, exact_node
from ..checks import CheckResult
from ..defaults import (
    DEFAULT_SEED,
    FOLD_RADIUS,
    INVOLUTION_WITNESS_NODES,
    SMOOTH_SAMPLE_POINTS,
    SYMMETRY_TOLERANCE,
)
from ..errors import DegreeError, DimensionMismatchError, SymmetryError
from ..multivector import MultivectorField
from ..sampling import STREAM_INVOLUTION, random_generator

LOGGER = logging.getLogger(__name__)

FOLD_NAMES = ("theta", "x1", "x2", "x3")
FOLD_COEFFICIENTS = {(2, 3): "x1", (1, 3): "x2", (1, 2): "-x3"}
FOLD_CASIMIRS = ("theta", "-x1^2 + x2^2 + x3^2")

INVOLUTION_SIGNS = (1, -1, -1, 1)
INVOLUTION_SHIFT = (math.pi, 0, 0, 0)

# {e_a, e_b} = c * e_c on the coordinate functions (x1, x2, x3)
SL2_RELATIONS = (((1, 2), -1, 3), ((2, 3), 1, 1), ((1, 3), 1, 2))


def fold_chart(radius=FOLD_RADIUS):
    return Chart(
        FOLD_NAMES,
        bounds=[(0, TWO_PI)] + [(-radius, radius)] * 3,
        periods=(TWO_PI, None, None, None),
        label="fold",
    )


def fold_casimirs(chart=None):
    chart = chart or fold_chart()
    return tuple(chart.scalar(text) for text in FOLD_CASIMIRS)


def involution(point):
    theta, x1, x2, x3 = point
    return (theta + math.pi, -x1, -x2, x3)


def quotient_representative(point):
    """The point of theta in [0, pi) identified with ``point`` by the involution."""
    theta, x1, x2, x3 = point
    theta = float(theta) % TWO_PI
    if theta >= math.pi:
        return (theta - math.pi, -x1, -x2, x3)
    return (theta, x1, x2, x3)


def _first_nonzero_node(chart, polynomial):
    """First node (lexicographic) of a coarse grid where ``polynomial`` is nonzero."""
    grid = GridSpec.for_chart(chart, [INVOLUTION_WITNESS_NODES] * chart.dimension)
    for node in grid.nodes():
        value = polynomial.evaluate(exact_node(node))
        if value:
            return tuple(node), value
    return None, Fraction(0)


def _sampled_points(chart, samples, seed):
    return chart.sample(random_generator(seed, STREAM_INVOLUTION), samples)


def certify_involution_symmetric(chart, k, samples=SMOOTH_SAMPLE_POINTS, seed=DEFAULT_SEED,
                                 tolerance=SYMMETRY_TOLERANCE):
    """Check k o iota = k: exactly for a theta-free polynomial, else at sampled points."""
    k = chart.scalar(k)
    if k.is_exact and not k.polynomial.depends_on(0):
        residual = k.polynomial.reflect([1, 2]) - k.polynomial
        if residual.is_zero:
            return CheckResult(name="involution_symmetric_k", passed=True, exact=True)
        witness, value = _first_nonzero_node(chart, residual)
        return CheckResult(
            name="involution_symmetric_k",
            passed=False,
            exact=True,
            residual=value,
            witness=witness,
            detail={"difference": str(residual)},
        )

    pulled = k.pullback(INVOLUTION_SIGNS, INVOLUTION_SHIFT)
    worst, witness = 0.0, None
    for point in _sampled_points(chart, samples, seed):
        value = float(k(point))
        relative = abs(float(pulled(point)) - value) / max(1.0, abs(value))
        if relative > worst:
            worst, witness = relative, point
    return CheckResult(
        name="involution_symmetric_k",
        passed=worst <= tolerance,
        exact=False,
        residual=worst,
        witness=witness,
    )


def fold_model(k=1, orientable=True, chart=None):
    chart = chart or fold_chart()
    k = chart.scalar(k)
    require_nonvanishing(chart, k, "k")
    if not orientable:
        symmetric = certify_involution_symmetric(chart, k)
        if not symmetric:
            raise SymmetryError(
                f"k = {k!r} is not invariant under the involution (near {symmetric.witness}), "
                f"so it does not descend to the non-orientable quotient"
            )
    bivector = MultivectorField(
        chart, 2, {key: chart.scalar(text) for key, text in FOLD_COEFFICIENTS.items()}
    ).scale(k)
    tag = "fold" if orientable else "fold-nonorientable"
    LOGGER.debug(f"{tag} model with k = {k!r}")
    return PoissonStructure(chart, bivector, fold_casimirs(chart), k, tag)


def fold_singular_distance(point):
    """Euclidean distance to the singular circle x = 0."""
    return sum(float(coordinate) ** 2 for coordinate in point[1:]) ** 0.5


def _theta_free_derivatives(field):
    return field.is_exact and not any(
        field.polynomial.diff(index).depends_on(0) for index in range(1, 4)
    )


def involution_poisson_check(P, g, h, samples=SMOOTH_SAMPLE_POINTS, seed=DEFAULT_SEED,
                             tolerance=SYMMETRY_TOLERANCE):
    """Whether {g o iota, h o iota} = {g, h} o iota.

    Exact when the bivector is a theta-free polynomial with theta as a Casimir and g, h have
    theta-free x-derivatives: then the theta shift never enters and iota acts as the reflection
    of x1 and x2. Otherwise both sides are compared at sampled points.
    """
    if P.dimension != 4:
        raise DimensionMismatchError("The involution acts on 4-dimensional fold charts")
    chart = P.chart
    g = chart.scalar(g)
    h = chart.scalar(h)

    theta_central = all((0, j) not in P.bivector.coefficients for j in range(1, 4))
    exact_path = (
        P.is_exact
        and theta_central
        and not any(poly.depends_on(0) for poly in P.bivector.polynomials().values())
        and _theta_free_derivatives(g)
        and _theta_free_derivatives(h)
    )
    if exact_path:
        lhs = bracket(P, g.polynomial.reflect([1, 2]), h.polynomial.reflect([1, 2]))
        rhs = bracket(P, g, h).polynomial.reflect([1, 2])
        residual = lhs.polynomial - rhs
        if residual.is_zero:
            return CheckResult(name="involution_poisson_map", passed=True, exact=True)
        witness, value = _first_nonzero_node(chart, residual)
        LOGGER.debug(f"Involution check fails: residual field {residual}")
        return CheckResult(
            name="involution_poisson_map",
            passed=False,
            exact=True,
            residual=value,
            witness=witness,
            detail={"residual_field": str(residual)},
        )

    lhs = bracket(
        P,
        g.pullback(INVOLUTION_SIGNS, INVOLUTION_SHIFT),
        h.pullback(INVOLUTION_SIGNS, INVOLUTION_SHIFT),
    )
    rhs = bracket(P, g, h).pullback(INVOLUTION_SIGNS, INVOLUTION_SHIFT)
    worst, witness = 0.0, None
    for point in _sampled_points(chart, samples, seed):
        expected = float(rhs(point, exact=False))
        relative = abs(float(lhs(point, exact=False)) - expected) / max(1.0, abs(expected))
        if relative > worst:
            worst, witness = relative, point
    return CheckResult(
        name="involution_poisson_map",
        passed=worst <= tolerance,
        exact=False,
        residual=worst,
        witness=witness,
    )


def _linear_structure_constants(P):
    """c[(a, b)][c] with {x_a, x_b} = sum_c c[(a, b)][c] x_c; DegreeError unless linear."""
    constants = {}
    for key, polynomial in P.bivector.polynomials().items():
        row = {}
        for monom, coeff in polynomial.terms.items():
            if sum(monom) != 1:
                raise DegreeError(
                    f"Coefficient {polynomial} on {key} is not a linear form in the coordinates"
                )
            row[monom.index(1)] = coeff
        constants[key] = row
    return constants


def sl2_check(P, normalize=False):
    """Whether {x1, x2} = -x3, {x2, x3} = x1 and {x1, x3} = x2, with theta central.

    With ``normalize`` a common nonzero constant factor is divided out first.
    """
    if P.dimension != 4 or not P.is_exact:
        return CheckResult(name="sl2", passed=False, exact=True, detail={"reason": "not a fold chart"})
    try:
        constants = _linear_structure_constants(P)
    except DegreeError as error:
        return CheckResult(name="sl2", passed=False, exact=True, detail={"reason": str(error)})

    scale = Fraction(1)
    if normalize:
        (first_pair, first_sign, first_target) = SL2_RELATIONS[0]
        observed = constants.get(first_pair, {}).get(first_target)
        if observed:
            scale = Fraction(observed) / first_sign

    expected = {pair: {target: sign * scale} for pair, sign, target in SL2_RELATIONS}
    passed = {key: row for key, row in constants.items() if row} == expected
    return CheckResult(
        name="sl2",
        passed=passed,
        exact=True,
        detail={"scale": scale, "constants": {str(key): row for key, row in sorted(constants.items())}},
    )


def killing_signature(P, tolerance=1e-12):
    """(positive, negative, zero) eigenvalue counts of the Killing form of the linear bracket.

    Coordinates that are central (bracket zero with everything) are left out. The fold model gives
    (2, 1, 0): the split real form sl(2, R), not the compact so(3).
    """
    constants = _linear_structure_constants(P)
    active = sorted({index for key in constants for index in key})
    position = {index: slot for slot, index in enumerate(active)}
    size = len(active)
    if not size:
        return (0, 0, 0)

    adjoint = np.zeros((size, size, size))
    for (a, b), row in constants.items():
        for c, coeff in row.items():
            if c not in position:
                raise DegreeError(f"Bracket of x{a}, x{b} leaves the non-central coordinates")
            adjoint[position[a], position[c], position[b]] = float(coeff)
            adjoint[position[b], position[c], position[a]] = -float(coeff)
    killing = np.einsum("aij,bji->ab", adjoint, adjoint)
    eigenvalues = np.linalg.eigvalsh(killing)
    return (
        int(np.sum(eigenvalues > tolerance)),
        int(np.sum(eigenvalues < -tolerance)),
        int(np.sum(np.abs(eigenvalues) <= tolerance)),
    )
