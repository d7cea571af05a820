from fractions import Fraction

import pytest
from hypothesis import HealthCheck, settings

from foliation_forge.chart import Chart
from foliation_forge.defaults import DEFAULT_SEED
from foliation_forge.models import fold_chart, fold_model, lefschetz_model
from foliation_forge.sampling import random_generator

# Exact polynomial algebra is too slow for hypothesis' default per-example deadline
settings.register_profile(
    "foliation_forge",
    deadline=None,
    max_examples=100,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.filter_too_much],
)
settings.load_profile("foliation_forge")


@pytest.fixture
def lefschetz():
    return lefschetz_model()


@pytest.fixture
def fold():
    return fold_model()


@pytest.fixture
def half_fold_chart():
    """Fold chart of half-width 1/2, where 1 + x1 stays positive."""
    return fold_chart(Fraction(1, 2))


@pytest.fixture
def chart4():
    return Chart(("x1", "x2", "x3", "x4"))


@pytest.fixture
def chart3():
    return Chart(("x1", "x2", "x3"))


@pytest.fixture
def rng():
    return random_generator(DEFAULT_SEED, 99)
