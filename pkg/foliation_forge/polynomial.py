"""Exact multivariate polynomials with rational coefficients.

Thin wrapper around sympy's sparse polynomial rings over QQ with a fixed graded lexicographic
term order. Values are immutable; two polynomials compare equal iff their term maps do.
"""
import logging
from fractions import Fraction
from functools import lru_cache

import sympy
from sympy.polys.domains import QQ
from sympy.polys.orderings import grlex
from sympy.polys.rings import PolyRing

from .errors import ChartMismatchError, DimensionMismatchError, PolynomialParseError

LOGGER = logging.getLogger(__name__)


@lru_cache(maxsize=None)
def polynomial_ring(names):
    """Return the (cached) polynomial ring over QQ in the given variable names."""
    if not names:
        raise ValueError("A polynomial ring needs at least one variable")
    return PolyRing(tuple(names), QQ, grlex)


def to_fraction(value):
    """Convert a QQ domain element, int or Fraction to a Fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    return Fraction(int(value.numerator), int(value.denominator))


def to_qq(value):
    value = Fraction(value)
    return QQ(value.numerator, value.denominator)


def is_rational_point(point):
    return all(
        isinstance(coordinate, (int, Fraction)) and not isinstance(coordinate, bool)
        for coordinate in point
    )


class Polynomial:
    __slots__ = ("_element", "_fraction_terms")

    def __init__(self, element):
        self._element = element
        self._fraction_terms = None

    @classmethod
    def zero(cls, names):
        return cls(polynomial_ring(tuple(names)).zero)

    @classmethod
    def constant(cls, names, value):
        ring = polynomial_ring(tuple(names))
        return cls(ring.ground_new(to_qq(value)))

    @classmethod
    def variable(cls, names, index):
        ring = polynomial_ring(tuple(names))
        if not 0 <= index < ring.ngens:
            raise IndexError(f"Variable index {index} out of range for {ring.ngens} variables")
        return cls(ring.gens[index])

    @classmethod
    def from_terms(cls, names, terms):
        ring = polynomial_ring(tuple(names))
        for monom in terms:
            if len(monom) != ring.ngens or any(power < 0 for power in monom):
                raise DimensionMismatchError(
                    f"Exponent tuple {monom} does not fit {ring.ngens} variables"
                )
        return cls(
            ring.from_dict(
                {tuple(monom): to_qq(coeff) for monom, coeff in terms.items() if coeff}
            )
        )

    @property
    def element(self):
        return self._element

    @property
    def ring(self):
        return self._element.ring

    @property
    def names(self):
        return tuple(str(symbol) for symbol in self.ring.symbols)

    @property
    def dimension(self):
        return self.ring.ngens

    @property
    def terms(self):
        """Exponent tuple -> nonzero Fraction coefficient."""
        if self._fraction_terms is None:
            self._fraction_terms = tuple(
                (monom, to_fraction(coeff)) for monom, coeff in self._element.items()
            )
        return dict(self._fraction_terms)

    def ordered_terms(self):
        """Terms in descending graded lexicographic order."""
        return [(monom, to_fraction(coeff)) for monom, coeff in self._element.terms(grlex)]

    @property
    def is_zero(self):
        return not self._element

    @property
    def is_constant(self):
        return all(not any(monom) for monom in self._element)

    @property
    def constant_term(self):
        return to_fraction(self._element.get(self.ring.zero_monom, QQ.zero))

    @property
    def degree(self):
        """Total degree; -1 for the zero polynomial."""
        return max((sum(monom) for monom in self._element), default=-1)

    def degree_in(self, index):
        return max((monom[index] for monom in self._element), default=-1)

    def depends_on(self, index):
        return self.degree_in(index) > 0

    def _coerce(self, other):
        if isinstance(other, Polynomial):
            if other.ring is not self.ring:
                if other.dimension != self.dimension:
                    raise DimensionMismatchError(
                        f"Cannot combine polynomials in {self.dimension} and "
                        f"{other.dimension} variables"
                    )
                raise ChartMismatchError(
                    f"Cannot combine polynomials in {self.names} and {other.names}"
                )
            return other._element
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return self.ring.ground_new(to_qq(other))
        return NotImplemented

    def __add__(self, other):
        element = self._coerce(other)
        if element is NotImplemented:
            return NotImplemented
        return Polynomial(self._element + element)

    __radd__ = __add__

    def __sub__(self, other):
        element = self._coerce(other)
        if element is NotImplemented:
            return NotImplemented
        return Polynomial(self._element - element)

    def __rsub__(self, other):
        element = self._coerce(other)
        if element is NotImplemented:
            return NotImplemented
        return Polynomial(element - self._element)

    def __mul__(self, other):
        element = self._coerce(other)
        if element is NotImplemented:
            return NotImplemented
        return Polynomial(self._element * element)

    __rmul__ = __mul__

    def __neg__(self):
        return Polynomial(-self._element)

    def __pow__(self, exponent):
        if not isinstance(exponent, int) or exponent < 0:
            raise ValueError(f"Polynomials only take non-negative integer powers, got {exponent}")
        return Polynomial(self._element**exponent)

    def __eq__(self, other):
        if isinstance(other, Polynomial):
            return self.ring is other.ring and self._element == other._element
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return self.is_constant and self.constant_term == other
        return NotImplemented

    def __hash__(self):
        return hash((self.names, frozenset(self.terms.items())))

    def __bool__(self):
        return not self.is_zero

    def __repr__(self):
        return f"Polynomial({format_polynomial(self)!r}, names={self.names})"

    def __str__(self):
        return format_polynomial(self)

    def __call__(self, point, exact=None):
        return self.evaluate(point, exact=exact)

    def evaluate(self, point, exact=None):
        """Value at ``point``.

        Exact (a Fraction) when every coordinate is rational, or when ``exact`` is forced (floats
        are then read as the binary rationals they are). Otherwise float arithmetic is used, which
        also broadcasts over numpy arrays.
        """
        point = tuple(point)
        if len(point) != self.dimension:
            raise DimensionMismatchError(
                f"Point has {len(point)} coordinates, polynomial has {self.dimension} variables"
            )
        if exact is None:
            exact = is_rational_point(point)
        if self._fraction_terms is None:
            self.terms
        if exact:
            values = [Fraction(coordinate) for coordinate in point]
            total = Fraction(0)
            for monom, coeff in self._fraction_terms:
                term = coeff
                for value, power in zip(values, monom):
                    if power:
                        term *= value**power
                total += term
            return total

        total = 0.0
        for monom, coeff in self._fraction_terms:
            term = float(coeff)
            for value, power in zip(point, monom):
                if power:
                    term = term * value**power
            total = total + term
        return total

    def diff(self, index):
        if not 0 <= index < self.dimension:
            raise IndexError(
                f"Variable index {index} out of range for {self.dimension} variables"
            )
        return Polynomial(self._element.diff(index))

    def gradient(self):
        return tuple(self.diff(index) for index in range(self.dimension))

    def reflect(self, indices):
        """Substitute x_i -> -x_i for every i in ``indices``."""
        indices = tuple(indices)
        return Polynomial(
            self.ring.from_dict(
                {
                    monom: (-coeff if sum(monom[i] for i in indices) % 2 else coeff)
                    for monom, coeff in self._element.items()
                }
            )
        )

    def embed(self, names, positions):
        """Lift into the ring on ``names``; variable i of self becomes variable positions[i]."""
        names = tuple(names)
        positions = tuple(positions)
        if len(positions) != self.dimension:
            raise DimensionMismatchError(
                f"Need {self.dimension} target positions, got {len(positions)}"
            )
        ring = polynomial_ring(names)
        terms = {}
        for monom, coeff in self._element.items():
            lifted = [0] * ring.ngens
            for position, power in zip(positions, monom):
                lifted[position] += power
            terms[tuple(lifted)] = coeff
        return Polynomial(ring.from_dict(terms))

    def divide(self, other):
        """Return (quotient, remainder) of multivariate division by a single polynomial."""
        divisor = self._coerce(other)
        quotient, remainder = self._element.div(divisor)
        return Polynomial(quotient), Polynomial(remainder)


def poly_eval(p, x):
    return p.evaluate(x)


def poly_diff(p, var):
    return p.diff(var)


def _format_monomial(names, monom):
    factors = []
    for name, power in zip(names, monom):
        if power == 1:
            factors.append(name)
        elif power:
            factors.append(f"{name}^{power}")
    return "*".join(factors)


def format_rational(value):
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def format_polynomial(p, names=None):
    """Byte-stable text form: graded lexicographic order, rationals as num/den."""
    names = tuple(names) if names else p.names
    if p.is_zero:
        return "0"
    pieces = []
    for monom, coeff in p.ordered_terms():
        sign = "-" if coeff < 0 else "+"
        magnitude = abs(coeff)
        monomial = _format_monomial(names, monom)
        if not monomial:
            body = format_rational(magnitude)
        elif magnitude == 1:
            body = monomial
        else:
            body = f"{format_rational(magnitude)}*{monomial}"
        pieces.append((sign, body))
    first_sign, first_body = pieces[0]
    text = f"-{first_body}" if first_sign == "-" else first_body
    for sign, body in pieces[1:]:
        text += f" {sign} {body}"
    return text


def parse_polynomial(text, names):
    """Parse ``text`` as a polynomial in ``names``.

    Besides the chart names, ``x0 .. x{n-1}`` are accepted as index aliases; a chart name wins
    when the two collide.
    """
    names = tuple(names)
    ring = polynomial_ring(names)
    symbols = {f"x{index}": symbol for index, symbol in enumerate(ring.symbols)}
    symbols.update({str(symbol): symbol for symbol in ring.symbols})
    try:
        expression = sympy.sympify(str(text), locals=symbols, rational=True)
        element = ring.from_expr(expression)
    except (sympy.SympifyError, SyntaxError, TypeError, ValueError) as error:
        raise PolynomialParseError(
            f"Cannot read {text!r} as a polynomial in {', '.join(names)}: {error}"
        ) from error
    return Polynomial(element)
