"""Scalar fields with two backends.

``Exact`` fields carry a Polynomial and answer every query exactly at rational points.
``Smooth`` fields carry numeric evaluators: a value function, a gradient function and optionally
a Hessian function, each taking a point (tuple of floats).
"""
import itertools
import logging
from fractions import Fraction

import numpy as np

from .checks import CheckResult
from .defaults import (
    FINITE_DIFFERENCE_STEP,
    GRADIENT_CHECK_TOLERANCE,
    NONVANISHING_NODES_PER_AXIS,
)
from .errors import BackendError, DimensionMismatchError
from .polynomial import Polynomial

LOGGER = logging.getLogger(__name__)


def _central_difference(function, point, index, step):
    forward = list(point)
    backward = list(point)
    scale = step * max(1.0, abs(float(point[index])))
    forward[index] = float(point[index]) + scale
    backward[index] = float(point[index]) - scale
    return (np.asarray(function(tuple(forward)), dtype=float) - np.asarray(
        function(tuple(backward)), dtype=float
    )) / (2 * scale)


class ScalarField:
    __slots__ = (
        "dimension",
        "polynomial",
        "_value",
        "_gradient",
        "_hessian",
        "_gradient_polys",
        "_hessian_polys",
    )

    def __init__(self, dimension, polynomial=None, value=None, gradient=None, hessian=None):
        if polynomial is None and (value is None or gradient is None):
            raise ValueError("A Smooth scalar field needs both a value and a gradient evaluator")
        if polynomial is not None and polynomial.dimension != dimension:
            raise DimensionMismatchError(
                f"Polynomial in {polynomial.dimension} variables for a {dimension}-dimensional field"
            )
        self.dimension = dimension
        self.polynomial = polynomial
        self._value = value
        self._gradient = gradient
        self._hessian = hessian
        self._gradient_polys = None
        self._hessian_polys = None

    @classmethod
    def exact(cls, polynomial):
        return cls(polynomial.dimension, polynomial=polynomial)

    @classmethod
    def smooth(cls, dimension, value, gradient, hessian=None):
        return cls(dimension, value=value, gradient=gradient, hessian=hessian)

    @classmethod
    def constant(cls, names, value):
        return cls.exact(Polynomial.constant(names, value))

    @property
    def is_exact(self):
        return self.polynomial is not None

    @property
    def has_hessian(self):
        return self.is_exact or self._hessian is not None

    def require_exact(self, operation):
        if not self.is_exact:
            raise BackendError(f"{operation} needs an Exact (polynomial) scalar field")
        return self.polynomial

    def _check_point(self, point):
        point = tuple(point)
        if len(point) != self.dimension:
            raise DimensionMismatchError(
                f"Point has {len(point)} coordinates, field is {self.dimension}-dimensional"
            )
        return point

    def __call__(self, point, exact=None):
        point = self._check_point(point)
        if self.is_exact:
            return self.polynomial.evaluate(point, exact=exact)
        return self._value(point)

    def gradient(self, point, exact=None):
        point = self._check_point(point)
        if self.is_exact:
            if self._gradient_polys is None:
                self._gradient_polys = self.polynomial.gradient()
            return tuple(poly.evaluate(point, exact=exact) for poly in self._gradient_polys)
        return tuple(float(component) for component in self._gradient(point))

    def hessian(self, point, exact=None):
        point = self._check_point(point)
        if self.is_exact:
            if self._hessian_polys is None:
                if self._gradient_polys is None:
                    self._gradient_polys = self.polynomial.gradient()
                self._hessian_polys = tuple(poly.gradient() for poly in self._gradient_polys)
            return tuple(
                tuple(poly.evaluate(point, exact=exact) for poly in row)
                for row in self._hessian_polys
            )
        if self._hessian is not None:
            return tuple(tuple(float(entry) for entry in row) for row in self._hessian(point))
        columns = [
            _central_difference(self._gradient, point, index, FINITE_DIFFERENCE_STEP)
            for index in range(self.dimension)
        ]
        matrix = np.column_stack(columns)
        matrix = (matrix + matrix.T) / 2
        return tuple(tuple(float(entry) for entry in row) for row in matrix)

    def derivative(self, index):
        if not 0 <= index < self.dimension:
            raise IndexError(f"Variable index {index} out of range for {self.dimension} variables")
        if self.is_exact:
            return ScalarField.exact(self.polynomial.diff(index))
        return ScalarField.smooth(
            self.dimension,
            value=lambda point: self.gradient(point)[index],
            gradient=lambda point: self.hessian(point)[index],
        )

    def as_smooth(self):
        """The same field behind numeric evaluators (for backend agreement checks)."""
        if not self.is_exact:
            return self
        return ScalarField.smooth(
            self.dimension,
            value=lambda point: self(point),
            gradient=lambda point: self.gradient(point),
            hessian=lambda point: self.hessian(point),
        )

    def pullback(self, signs, shift=None):
        """The field x -> self(s * x + shift) for a diagonal sign flip and a translation."""
        signs = tuple(signs)
        shift = tuple(shift) if shift is not None else (0,) * self.dimension
        if self.is_exact and all(
            not offset or not self.polynomial.depends_on(index)
            for index, offset in enumerate(shift)
        ):
            flipped = [index for index, sign in enumerate(signs) if sign < 0]
            return ScalarField.exact(self.polynomial.reflect(flipped))

        def image(point):
            return tuple(
                sign * float(coordinate) + offset
                for sign, coordinate, offset in zip(signs, point, shift)
            )

        return ScalarField.smooth(
            self.dimension,
            value=lambda point: self(image(point)),
            gradient=lambda point: tuple(
                sign * component
                for sign, component in zip(signs, self.gradient(image(point)))
            ),
            hessian=lambda point: tuple(
                tuple(signs[row] * signs[col] * entry for col, entry in enumerate(values))
                for row, values in enumerate(self.hessian(image(point)))
            ),
        )

    # arithmetic
    def _lift(self, other):
        if isinstance(other, ScalarField):
            if other.dimension != self.dimension:
                raise DimensionMismatchError(
                    f"Cannot combine {self.dimension}- and {other.dimension}-dimensional fields"
                )
            return other
        if isinstance(other, Polynomial):
            return ScalarField.exact(other)
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            if self.is_exact:
                return ScalarField.exact(Polynomial.constant(self.polynomial.names, other))
            constant = float(other)
            return ScalarField.smooth(
                self.dimension,
                value=lambda point: constant,
                gradient=lambda point: (0.0,) * self.dimension,
                hessian=lambda point: ((0.0,) * self.dimension,) * self.dimension,
            )
        if isinstance(other, float):
            return ScalarField.smooth(
                self.dimension,
                value=lambda point: other,
                gradient=lambda point: (0.0,) * self.dimension,
                hessian=lambda point: ((0.0,) * self.dimension,) * self.dimension,
            )
        return NotImplemented

    def __add__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return NotImplemented
        if self.is_exact and other.is_exact:
            return ScalarField.exact(self.polynomial + other.polynomial)
        hessian = None
        if self.has_hessian and other.has_hessian:
            hessian = lambda point: tuple(
                tuple(a + b for a, b in zip(row_a, row_b))
                for row_a, row_b in zip(self.hessian(point), other.hessian(point))
            )
        return ScalarField.smooth(
            self.dimension,
            value=lambda point: self(point) + other(point),
            gradient=lambda point: tuple(
                a + b for a, b in zip(self.gradient(point), other.gradient(point))
            ),
            hessian=hessian,
        )

    __radd__ = __add__

    def __neg__(self):
        if self.is_exact:
            return ScalarField.exact(-self.polynomial)
        return self * -1

    def __sub__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return NotImplemented
        if self.is_exact and other.is_exact:
            return ScalarField.exact(self.polynomial * other.polynomial)
        hessian = None
        if self.has_hessian and other.has_hessian:

            def hessian(point):
                a, b = self(point), other(point)
                grad_a, grad_b = self.gradient(point), other.gradient(point)
                hess_a, hess_b = self.hessian(point), other.hessian(point)
                return tuple(
                    tuple(
                        hess_a[i][j] * b
                        + grad_a[i] * grad_b[j]
                        + grad_b[i] * grad_a[j]
                        + a * hess_b[i][j]
                        for j in range(self.dimension)
                    )
                    for i in range(self.dimension)
                )

        return ScalarField.smooth(
            self.dimension,
            value=lambda point: self(point) * other(point),
            gradient=lambda point: tuple(
                grad_a * other(point) + self(point) * grad_b
                for grad_a, grad_b in zip(self.gradient(point), other.gradient(point))
            ),
            hessian=hessian,
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return NotImplemented
        if other.is_exact and other.polynomial.is_constant:
            constant = other.polynomial.constant_term
            if not constant:
                raise ZeroDivisionError("Division of a scalar field by zero")
            return self * (1 / constant)

        def value(point):
            return self(point) / other(point)

        def gradient(point):
            a, b = self(point), other(point)
            return tuple(
                (grad_a * b - a * grad_b) / (b * b)
                for grad_a, grad_b in zip(self.gradient(point), other.gradient(point))
            )

        return ScalarField.smooth(self.dimension, value=value, gradient=gradient)

    def __repr__(self):
        if self.is_exact:
            return f"ScalarField.exact({self.polynomial})"
        return f"ScalarField.smooth(dimension={self.dimension})"


def as_scalar_field(value, names):
    """Coerce a ScalarField, Polynomial, number or polynomial text to a ScalarField on ``names``."""
    from .polynomial import parse_polynomial

    if isinstance(value, ScalarField):
        if value.dimension != len(names):
            raise DimensionMismatchError(
                f"{value.dimension}-dimensional field on a {len(names)}-dimensional chart"
            )
        return value
    if isinstance(value, Polynomial):
        return ScalarField.exact(value)
    if isinstance(value, (int, Fraction)) and not isinstance(value, bool):
        return ScalarField.constant(names, value)
    if isinstance(value, str):
        return ScalarField.exact(parse_polynomial(value, names))
    raise TypeError(f"Cannot interpret {value!r} as a scalar field")


def scalar_grad(s, x):
    return s.gradient(x)


def check_gradient(s, point, tolerance=GRADIENT_CHECK_TOLERANCE, step=FINITE_DIFFERENCE_STEP):
    """Compare the gradient evaluator against central differences of the value evaluator."""
    point = tuple(float(coordinate) for coordinate in point)
    claimed = np.asarray([float(component) for component in s.gradient(point)])
    estimated = np.asarray(
        [
            float(_central_difference(lambda p: s(p), point, index, step))
            for index in range(s.dimension)
        ]
    )
    residual = float(np.max(np.abs(claimed - estimated) / np.maximum(1.0, np.abs(claimed))))
    return CheckResult(
        name="gradient",
        passed=residual <= tolerance,
        exact=False,
        residual=residual,
        witness=point,
    )


def _is_certified_positive_shape(polynomial):
    """Nonzero constant plus same-signed even monomials: such a polynomial never vanishes."""
    constant = polynomial.constant_term
    if not constant:
        return False
    for monom, coeff in polynomial.terms.items():
        if not any(monom):
            continue
        if any(power % 2 for power in monom) or (coeff > 0) != (constant > 0):
            return False
    return True


def is_nonvanishing(field, bounds, nodes_per_axis=NONVANISHING_NODES_PER_AXIS, name="nonvanishing"):
    """Check that ``field`` has no zero on the box ``bounds``.

    Exact proof for the certified shape (see ``_is_certified_positive_shape``); otherwise the field is
    sampled on a dense grid and must keep one strict sign (a sign change forces a zero).
    """
    if field.is_exact and _is_certified_positive_shape(field.polynomial):
        return CheckResult(name=name, passed=True, exact=True, residual=0)

    axes = [np.linspace(float(lo), float(hi), nodes_per_axis) for lo, hi in bounds]
    shape = tuple(len(axis) for axis in axes)
    if field.is_exact:
        mesh = np.meshgrid(*axes, indexing="ij")
        values = np.asarray(field.polynomial.evaluate(tuple(mesh), exact=False), dtype=float)
        values = np.broadcast_to(values, shape).ravel()
    else:
        values = np.asarray([float(field(node)) for node in itertools.product(*axes)])

    smallest = int(np.argmin(np.abs(values)))
    passed = bool((values > 0).all() or (values < 0).all())
    witness = None
    if not passed:
        index = np.unravel_index(smallest, shape)
        witness = tuple(float(axes[axis][i]) for axis, i in enumerate(index))
        LOGGER.debug(f"Field {field!r} vanishes or changes sign near {witness}")
    return CheckResult(
        name=name,
        passed=passed,
        exact=False,
        residual=float(np.abs(values[smallest])),
        witness=witness,
        detail={"nodes": int(values.size)},
    )
