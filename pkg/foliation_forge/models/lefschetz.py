"""The Lefschetz singularity: B^4 with complex coordinates z_j = x_j + i y_j and the fibration
(z_1, z_2) -> z_1^2 + z_2^2."""
import logging

from ..brackets import PoissonStructure, require_nonvanishing
from ..chart import Chart
from ..defaults import LEFSCHETZ_RADIUS
from ..multivector import MultivectorField

LOGGER = logging.getLogger(__name__)

LEFSCHETZ_NAMES = ("x1", "y1", "x2", "y2")

# (i, j) -> pi^ij for k = 1, indices into LEFSCHETZ_NAMES
LEFSCHETZ_COEFFICIENTS = {
    (0, 1): "x2^2 + y2^2",
    (2, 3): "x1^2 + y1^2",
    (0, 3): "-(y1*y2 + x1*x2)",
    (1, 2): "x1*x2 + y1*y2",
    (1, 3): "-x1*y2 + y1*x2",
    (0, 2): "-x1*y2 + y1*x2",
}

LEFSCHETZ_CASIMIRS = ("x1^2 - y1^2 + x2^2 - y2^2", "2*(x1*y1 + x2*y2)")


def lefschetz_chart(radius=LEFSCHETZ_RADIUS):
    return Chart(LEFSCHETZ_NAMES, bounds=[(-radius, radius)] * 4, label="lefschetz")


def lefschetz_casimirs(chart=None):
    """Real and imaginary parts of z_1^2 + z_2^2."""
    chart = chart or lefschetz_chart()
    return tuple(chart.scalar(text) for text in LEFSCHETZ_CASIMIRS)


def lefschetz_model(k=1, chart=None):
    chart = chart or lefschetz_chart()
    k = chart.scalar(k)
    require_nonvanishing(chart, k, "k")
    bivector = MultivectorField(
        chart, 2, {key: chart.scalar(text) for key, text in LEFSCHETZ_COEFFICIENTS.items()}
    ).scale(k)
    LOGGER.debug(f"Lefschetz model with k = {k!r}")
    return PoissonStructure(chart, bivector, lefschetz_casimirs(chart), k, "lefschetz")


def lefschetz_singular_distance(point):
    """Euclidean distance to the singular point at the origin."""
    return sum(float(coordinate) ** 2 for coordinate in point) ** 0.5
