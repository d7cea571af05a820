"""Alternating tensor fields on a chart: multivector fields and differential forms.

Coefficients are keyed by strictly increasing index tuples; a missing key is a zero coefficient.
The full antisymmetric tensor is recovered through ``permutation_sign``.
"""
import logging
import math
from fractions import Fraction
from itertools import combinations, permutations

import numpy as np
from sympy.polys.domains import QQ
from sympy.polys.matrices import DomainMatrix

from .defaults import RANK_TOLERANCE
from .errors import BackendError, ChartMismatchError, DegreeError, DimensionMismatchError
from .polynomial import Polynomial, is_rational_point, to_qq

LOGGER = logging.getLogger(__name__)


def permutation_sign(sequence):
    """Levi-Civita sign of ``sequence``: 0 on a repeated entry, else (-1)^inversions."""
    sequence = tuple(sequence)
    if len(set(sequence)) != len(sequence):
        return 0
    inversions = sum(
        1
        for i in range(len(sequence))
        for j in range(i + 1, len(sequence))
        if sequence[i] > sequence[j]
    )
    return -1 if inversions % 2 else 1


def sort_with_sign(indices):
    return permutation_sign(indices), tuple(sorted(indices))


class AlternatingField:
    variance = None

    __slots__ = ("chart", "degree", "coefficients")

    def __init__(self, chart, degree, coefficients=None):
        if not 0 <= degree <= chart.dimension:
            raise DegreeError(
                f"Degree {degree} is outside 0..{chart.dimension} on chart {chart.names}"
            )
        cleaned = {}
        for key, value in (coefficients or {}).items():
            key = tuple(key)
            if len(key) != degree or any(
                not 0 <= index < chart.dimension for index in key
            ) or any(a >= b for a, b in zip(key, key[1:])):
                raise ValueError(
                    f"Key {key} is not a strictly increasing {degree}-tuple of indices "
                    f"below {chart.dimension}"
                )
            field = chart.scalar(value)
            if field.is_exact and field.polynomial.is_zero:
                continue
            cleaned[key] = field
        self.chart = chart
        self.degree = degree
        self.coefficients = cleaned

    @classmethod
    def from_components(cls, chart, degree, components):
        """Build from coefficients on arbitrary (unsorted) index tuples, summing with signs."""
        collected = {}
        for key, value in components.items():
            sign, ordered = sort_with_sign(key)
            if not sign:
                continue
            field = chart.scalar(value) * sign
            collected[ordered] = collected[ordered] + field if ordered in collected else field
        return cls(chart, degree, collected)

    @classmethod
    def basis(cls, chart, *indices):
        return cls.from_components(chart, len(indices), {tuple(indices): 1})

    @classmethod
    def zero(cls, chart, degree):
        return cls(chart, degree, {})

    def _same_kind(self, other, operation):
        if not isinstance(other, AlternatingField) or other.variance != self.variance:
            raise TypeError(f"Cannot {operation} a {type(self).__name__} and {type(other).__name__}")
        if other.chart != self.chart:
            raise ChartMismatchError(
                f"Cannot {operation} fields on {self.chart.names} and {other.chart.names}"
            )

    def __getitem__(self, key):
        sign, ordered = sort_with_sign(key)
        if not sign or ordered not in self.coefficients:
            return self.chart.scalar(0)
        return self.coefficients[ordered] * sign

    @property
    def is_exact(self):
        return all(field.is_exact for field in self.coefficients.values())

    @property
    def is_zero(self):
        """True only for a provably zero field (no stored coefficients)."""
        return not self.coefficients

    def polynomials(self):
        """Key -> Polynomial for every stored coefficient; Exact fields only."""
        return {
            key: field.require_exact(f"Reading {type(self).__name__} coefficients")
            for key, field in self.coefficients.items()
        }

    def __add__(self, other):
        self._same_kind(other, "add")
        if other.degree != self.degree:
            raise DegreeError(f"Cannot add degrees {self.degree} and {other.degree}")
        combined = dict(self.coefficients)
        for key, field in other.coefficients.items():
            combined[key] = combined[key] + field if key in combined else field
        return type(self)(self.chart, self.degree, combined)

    def __neg__(self):
        return self.scale(-1)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, factor):
        if isinstance(factor, str):
            factor = self.chart.scalar(factor)
        return type(self)(
            self.chart,
            self.degree,
            {key: factor * field for key, field in self.coefficients.items()},
        )

    def values(self, point, exact=None):
        """Key -> coefficient value at ``point``."""
        point = self.chart.check_point(point)
        return {key: field(point, exact=exact) for key, field in self.coefficients.items()}

    def __eq__(self, other):
        if not isinstance(other, AlternatingField):
            return NotImplemented
        if other.variance != self.variance or other.degree != self.degree:
            return False
        if other.chart != self.chart or other.coefficients.keys() != self.coefficients.keys():
            return False
        if not (self.is_exact and other.is_exact):
            return all(
                other.coefficients[key] is field for key, field in self.coefficients.items()
            )
        return all(
            other.coefficients[key].polynomial == field.polynomial
            for key, field in self.coefficients.items()
        )

    __hash__ = None

    def __repr__(self):
        symbol = "d" if self.variance == "covariant" else "∂"
        parts = []
        for key, field in sorted(self.coefficients.items()):
            basis = "^".join(f"{symbol}{self.chart.names[i]}" for i in key)
            parts.append(f"({field.polynomial if field.is_exact else 'smooth'})*{basis}")
        return f"{type(self).__name__}({' + '.join(parts) or '0'})"


class MultivectorField(AlternatingField):
    variance = "contravariant"
    __slots__ = ()


class DifferentialForm(AlternatingField):
    variance = "covariant"
    __slots__ = ()


def differential(chart, field):
    """dF as a 1-form."""
    field = chart.scalar(field)
    return DifferentialForm(
        chart,
        1,
        {(index,): field.derivative(index) for index in range(chart.dimension)},
    )


def volume_form(chart):
    return DifferentialForm(chart, chart.dimension, {tuple(range(chart.dimension)): chart.orientation})


def wedge(a, b):
    a._same_kind(b, "wedge")
    degree = a.degree + b.degree
    if degree > a.chart.dimension:
        raise DegreeError(
            f"Wedge of degrees {a.degree} and {b.degree} overflows dimension {a.chart.dimension}"
        )
    components = {}
    for key_a, field_a in a.coefficients.items():
        for key_b, field_b in b.coefficients.items():
            sign, key = sort_with_sign(key_a + key_b)
            if not sign:
                continue
            product = field_a * field_b * sign
            components[key] = components[key] + product if key in components else product
    return type(a)(a.chart, degree, components)


def _covector_values(chart, covector, point):
    if isinstance(covector, AlternatingField):
        if covector.variance != "covariant" or covector.degree != 1:
            raise DegreeError("Expected a 1-form")
        if covector.chart != chart:
            raise ChartMismatchError(
                f"1-form on {covector.chart.names} used on chart {chart.names}"
            )
        values = covector.values(point)
        return [values.get((index,), 0) for index in range(chart.dimension)]
    covector = list(covector)
    if len(covector) != chart.dimension:
        raise DimensionMismatchError(
            f"Covector has {len(covector)} components, chart has {chart.dimension}"
        )
    return covector


def _require_bivector(pi):
    if not isinstance(pi, MultivectorField) or pi.degree != 2:
        raise DegreeError("Expected a bivector field")


def _require_degree_two(field):
    if not isinstance(field, AlternatingField) or field.degree != 2:
        raise DegreeError("Expected a bivector field or a 2-form")


def bivector_entries(pi, point, exact=None):
    """The full antisymmetric matrix of ``pi`` at ``point`` as nested lists."""
    _require_degree_two(pi)
    n = pi.chart.dimension
    zero = Fraction(0) if (exact or (exact is None and is_rational_point(point))) else 0.0
    matrix = [[zero] * n for _ in range(n)]
    for (i, j), value in pi.values(point, exact=exact).items():
        matrix[i][j] = value
        matrix[j][i] = -value
    return matrix


def bivector_matrix(pi, point):
    """Float matrix of ``pi`` at ``point``."""
    point = tuple(float(coordinate) for coordinate in point)
    return np.asarray(bivector_entries(pi, point, exact=False), dtype=float)


def pair_bivector(pi, alpha, beta, point):
    """pi(alpha, beta) at ``point``: sum over i<j of pi^ij (alpha_i beta_j - alpha_j beta_i)."""
    _require_bivector(pi)
    point = pi.chart.check_point(point)
    alpha = _covector_values(pi.chart, alpha, point)
    beta = _covector_values(pi.chart, beta, point)
    total = 0
    for (i, j), value in pi.values(point).items():
        total += value * (alpha[i] * beta[j] - alpha[j] * beta[i])
    return total


def anchor(pi, alpha, point):
    """The vector pi(., alpha) at ``point``: v^i = pi(dx^i, alpha)."""
    _require_bivector(pi)
    point = pi.chart.check_point(point)
    alpha = _covector_values(pi.chart, alpha, point)
    vector = [0] * pi.chart.dimension
    for (i, j), value in pi.values(point).items():
        vector[i] += value * alpha[j]
        vector[j] -= value * alpha[i]
    return tuple(vector)


def schouten_self_bracket(pi):
    """[pi, pi] with coefficients 2 * sum_l (pi^il d_l pi^jk + pi^jl d_l pi^ki + pi^kl d_l pi^ij).

    With this normalization [pi, pi](df, dg, dh) = 2 * Jacobiator(f, g, h).
    """
    _require_bivector(pi)
    if not pi.is_exact:
        raise BackendError("The Schouten bracket is computed for Exact coefficients only")
    chart = pi.chart
    n = chart.dimension
    zero = Polynomial.zero(chart.names)
    full = [[zero] * n for _ in range(n)]
    for (i, j), poly in pi.polynomials().items():
        full[i][j] = poly
        full[j][i] = -poly
    derivatives = [[[full[i][j].diff(l) for l in range(n)] for j in range(n)] for i in range(n)]

    coefficients = {}
    for i, j, k in combinations(range(n), 3):
        total = zero
        for l in range(n):
            total = (
                total
                + full[i][l] * derivatives[j][k][l]
                + full[j][l] * derivatives[k][i][l]
                + full[k][l] * derivatives[i][j][l]
            )
        if not total.is_zero:
            coefficients[(i, j, k)] = total * 2
    return MultivectorField(chart, 3, coefficients)


def _determinant(rows):
    size = len(rows)
    total = 0
    for order in permutations(range(size)):
        term = permutation_sign(order)
        for row, column in zip(rows, order):
            term *= row[column]
        total += term
    return total


def evaluate_on_covectors(tensor, covectors, point):
    """T(alpha_1, ..., alpha_p) at ``point`` for a degree-p multivector field."""
    if len(covectors) != tensor.degree:
        raise DegreeError(f"Need {tensor.degree} covectors, got {len(covectors)}")
    point = tensor.chart.check_point(point)
    components = [_covector_values(tensor.chart, covector, point) for covector in covectors]
    total = 0
    for key, value in tensor.values(point).items():
        total += value * _determinant([[component[index] for index in key] for component in components])
    return total


def exact_rank(rows):
    """Rank of a rational matrix by exact elimination."""
    if not rows or not rows[0]:
        return 0
    matrix = DomainMatrix(
        [[to_qq(entry) for entry in row] for row in rows], (len(rows), len(rows[0])), QQ
    )
    return int(matrix.rank())


def numeric_rank(matrix, tolerance=RANK_TOLERANCE):
    """Singular values below tolerance * (largest one, or 1 if all are tiny) count as zero."""
    matrix = np.asarray(matrix, dtype=float)
    if matrix.size == 0:
        return 0
    singular_values = np.linalg.svd(matrix, compute_uv=False)
    largest = float(singular_values.max()) if singular_values.size else 0.0
    scale = largest if largest >= tolerance else 1.0
    return int(np.sum(singular_values > tolerance * scale))


def _pfaffian4(m):
    return m[0][1] * m[2][3] - m[0][2] * m[1][3] + m[0][3] * m[1][2]


def rank_at(pi, point, exact=None, tolerance=RANK_TOLERANCE):
    """Rank of the matrix pi^ij at ``point``.

    Exact elimination when every coefficient is a polynomial and the point is rational (or
    ``exact`` forces it); singular-value rank otherwise.
    """
    _require_degree_two(pi)
    point = pi.chart.check_point(point)
    use_exact = pi.is_exact and (exact or (exact is None and is_rational_point(point)))
    if not use_exact:
        return numeric_rank(bivector_matrix(pi, point), tolerance)
    point = tuple(Fraction(coordinate) for coordinate in point)
    matrix = bivector_entries(pi, point, exact=True)
    if not any(any(row) for row in matrix):
        return 0
    if pi.chart.dimension == 4:
        return 4 if _pfaffian4(matrix) else 2
    return exact_rank(matrix)


def exterior_derivative(form):
    """d(sum a_I dx^I) = sum_I sum_l d_l a_I dx^l ^ dx^I."""
    if not isinstance(form, DifferentialForm):
        raise TypeError("The exterior derivative acts on differential forms")
    if form.degree == form.chart.dimension:
        return DifferentialForm.zero(form.chart, form.degree)
    components = {}
    for key, field in form.coefficients.items():
        for index in range(form.chart.dimension):
            sign, ordered = sort_with_sign((index,) + key)
            if not sign:
                continue
            term = field.derivative(index) * sign
            components[ordered] = components[ordered] + term if ordered in components else term
    return DifferentialForm(form.chart, form.degree + 1, components)


def hodge_star(form):
    """Euclidean Hodge star for the chart's orientation: *dx^I = sign(I, I^c) dx^(I^c)."""
    if not isinstance(form, DifferentialForm):
        raise TypeError("The Hodge star acts on differential forms")
    orientation = form.chart.orientation_constant()
    if orientation is None:
        raise BackendError("The Hodge star needs a constant orientation coefficient")
    flip = 1 if orientation > 0 else -1
    everything = range(form.chart.dimension)
    components = {}
    for key, field in form.coefficients.items():
        complement = tuple(index for index in everything if index not in key)
        components[complement] = field * (permutation_sign(key + complement) * flip)
    return DifferentialForm(form.chart, form.chart.dimension - form.degree, components)


def pointwise_norm(field, point):
    """Euclidean norm of the coefficient vector at ``point`` (float)."""
    return math.sqrt(sum(float(value) ** 2 for value in field.values(point, exact=False).values()))
