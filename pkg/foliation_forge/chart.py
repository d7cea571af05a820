"""Coordinate charts and node grids."""
import itertools
import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Tuple

import numpy as np

from .errors import DimensionMismatchError, VanishingFactorError
from .scalar import as_scalar_field, is_nonvanishing

LOGGER = logging.getLogger(__name__)

TWO_PI = 2 * math.pi


def _as_number(value):
    if isinstance(value, (int, Fraction)) and not isinstance(value, bool):
        return Fraction(value)
    return float(value)


class Chart:
    """A coordinate box with optional periodic axes and an orientation.

    The orientation is stored as the coefficient c of c * dx_0 ^ ... ^ dx_{n-1}.
    """

    __slots__ = ("names", "bounds", "periods", "orientation", "label")

    def __init__(self, names, bounds=None, periods=None, orientation=1, label=""):
        names = tuple(names)
        if not names:
            raise ValueError("A chart needs at least one coordinate")
        bounds = tuple(
            (_as_number(lo), _as_number(hi)) for lo, hi in (bounds or [(-1, 1)] * len(names))
        )
        periods = tuple(periods) if periods is not None else (None,) * len(names)
        if len(bounds) != len(names) or len(periods) != len(names):
            raise DimensionMismatchError(
                f"Chart on {names} needs {len(names)} bounds and periods, "
                f"got {len(bounds)} and {len(periods)}"
            )
        for name, (lo, hi) in zip(names, bounds):
            if not lo < hi:
                raise ValueError(f"Empty interval [{lo}, {hi}] for coordinate {name}")
        self.names = names
        self.bounds = bounds
        self.periods = periods
        self.orientation = as_scalar_field(orientation, names)
        self.label = label
        self._check_orientation()

    def _check_orientation(self):
        orientation = self.orientation
        if orientation.is_exact and orientation.polynomial.is_constant:
            if not orientation.polynomial.constant_term:
                raise VanishingFactorError(f"Orientation of chart {self.names} is zero")
            return
        result = is_nonvanishing(orientation, self.bounds, name="orientation")
        if not result:
            raise VanishingFactorError(
                f"Orientation of chart {self.names} vanishes near {result.witness}"
            )

    @property
    def dimension(self):
        return len(self.names)

    def index(self, name):
        try:
            return self.names.index(name)
        except ValueError:
            raise ValueError(f"Chart {self.names} has no coordinate {name!r}") from None

    def orientation_constant(self):
        """The orientation coefficient when it is an exact constant, else None."""
        if self.orientation.is_exact and self.orientation.polynomial.is_constant:
            return self.orientation.polynomial.constant_term
        return None

    def check_point(self, point):
        point = tuple(point)
        if len(point) != self.dimension:
            raise DimensionMismatchError(
                f"Point has {len(point)} coordinates, chart {self.names} has {self.dimension}"
            )
        return point

    def normalize(self, point):
        """Wrap periodic coordinates into [0, period)."""
        point = self.check_point(point)
        return tuple(
            coordinate % period if period else coordinate
            for coordinate, period in zip(point, self.periods)
        )

    def contains(self, point, tolerance=0.0):
        point = self.check_point(point)
        for coordinate, (lo, hi), period in zip(point, self.bounds, self.periods):
            if period:
                continue
            if coordinate < lo - tolerance or coordinate > hi + tolerance:
                return False
        return True

    def sample(self, rng, count, margin=0.0):
        """``count`` uniform float points in the box (shrunk by ``margin`` on every side)."""
        lows = np.asarray([float(lo) + margin for lo, _ in self.bounds])
        highs = np.asarray([float(hi) - margin for _, hi in self.bounds])
        samples = rng.uniform(lows, highs, size=(count, self.dimension))
        return [tuple(float(value) for value in row) for row in samples]

    def scalar(self, value):
        return as_scalar_field(value, self.names)

    def __eq__(self, other):
        if not isinstance(other, Chart):
            return NotImplemented
        if (self.names, self.bounds, self.periods) != (other.names, other.bounds, other.periods):
            return False
        if self.orientation is other.orientation:
            return True
        return (
            self.orientation.is_exact
            and other.orientation.is_exact
            and self.orientation.polynomial == other.orientation.polynomial
        )

    def __hash__(self):
        return hash((self.names, self.bounds, self.periods))

    def __repr__(self):
        return f"Chart({', '.join(self.names)}{f', {self.label}' if self.label else ''})"


@dataclass(frozen=True)
class GridAxis:
    lo: object
    hi: object
    count: int
    endpoint: bool = True

    def nodes(self):
        if self.count <= 0:
            return []
        if self.count == 1:
            return [self.lo]
        intervals = self.count - 1 if self.endpoint else self.count
        step = (self.hi - self.lo) / intervals
        return [self.lo + i * step for i in range(self.count)]


@dataclass(frozen=True)
class GridSpec:
    axes: Tuple[GridAxis, ...]

    @classmethod
    def for_chart(cls, chart, counts, bounds=None):
        """A grid over the chart's box; periodic axes leave out their right end (it wraps)."""
        counts = tuple(counts)
        if len(counts) != chart.dimension:
            raise DimensionMismatchError(
                f"Grid needs {chart.dimension} node counts, got {len(counts)}"
            )
        bounds = bounds or chart.bounds
        return cls(
            tuple(
                GridAxis(_as_number(lo), _as_number(hi), int(count), endpoint=not period)
                for (lo, hi), count, period in zip(bounds, counts, chart.periods)
            )
        )

    @property
    def counts(self):
        return tuple(axis.count for axis in self.axes)

    @property
    def size(self):
        return math.prod(self.counts)

    def nodes(self):
        """Nodes in lexicographic order."""
        return itertools.product(*(axis.nodes() for axis in self.axes))

    def within(self, chart):
        if len(self.axes) != chart.dimension:
            return False
        for axis, (lo, hi) in zip(self.axes, chart.bounds):
            if axis.lo < lo or axis.hi > hi:
                return False
        return True


def exact_node(node):
    """Read every coordinate as an exact rational (floats as the binary rationals they are)."""
    return tuple(Fraction(coordinate) for coordinate in node)

