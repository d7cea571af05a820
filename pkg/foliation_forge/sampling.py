"""Seeded randomness shared by the property suites and the CLI.

Every suite draws from its own Philox stream keyed by (seed, stream), so running suites in a
different order or in parallel never changes what any of them sees.
"""
from fractions import Fraction

import numpy as np

from .polynomial import Polynomial

STREAM_CASIMIRS = 1
STREAM_INVOLUTION = 3
STREAM_JACOBI = 5


def random_generator(seed, stream=0):
    sequence = np.random.SeedSequence(entropy=int(seed), spawn_key=(int(stream),))
    return np.random.Generator(np.random.Philox(sequence))


def random_rational(rng, max_numerator=5, max_denominator=4):
    numerator = int(rng.integers(-max_numerator, max_numerator + 1))
    denominator = int(rng.integers(1, max_denominator + 1))
    return Fraction(numerator, denominator)


def random_polynomial(rng, names, max_degree=3, terms=4, max_numerator=5, max_denominator=4):
    """A sparse polynomial with small rational coefficients and total degree <= max_degree."""
    dimension = len(names)
    coefficients = {}
    for _ in range(terms):
        degree = int(rng.integers(0, max_degree + 1))
        monom = [0] * dimension
        for _ in range(degree):
            monom[int(rng.integers(0, dimension))] += 1
        monom = tuple(monom)
        coefficients[monom] = coefficients.get(monom, 0) + random_rational(
            rng, max_numerator, max_denominator
        )
    return Polynomial.from_terms(names, coefficients)


def random_rational_point(rng, dimension, max_numerator=9, max_denominator=7):
    return tuple(
        random_rational(rng, max_numerator, max_denominator) for _ in range(dimension)
    )
