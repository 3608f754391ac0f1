"""
Random instance generators for the verification suites and the search.

All samplers draw from an explicit ``numpy.random.Generator`` so that every
suite and search is reproducible from its seed.
"""

from fractions import Fraction
from typing import Tuple

import numpy as np

from .prob_core import DiscreteMeasure, RandomVariable


def simplex_weights(n: int, rng: np.random.Generator) -> DiscreteMeasure:
    """
    A measure drawn uniformly from the probability simplex.

    Exponential trick: g_i ~ Exp(1), w_i = g_i / sum g.
    """
    g = rng.exponential(1.0, size=n)
    return DiscreteMeasure(g / g.sum())


def random_real(n: int, rng: np.random.Generator, bound: float = 1.0) -> RandomVariable:
    return RandomVariable(rng.uniform(-bound, bound, size=n))


def random_complex(n: int, rng: np.random.Generator) -> RandomVariable:
    """Uniform in the closed unit disc, coordinatewise."""
    radius = np.sqrt(rng.uniform(0.0, 1.0, size=n))
    angle = rng.uniform(0.0, 2 * np.pi, size=n)
    return RandomVariable(radius * np.exp(1j * angle), "complex")


def random_nonnegative(n: int, rng: np.random.Generator) -> RandomVariable:
    return RandomVariable(rng.uniform(0.0, 1.0, size=n))


def random_monotone_pair(n: int, rng: np.random.Generator) -> Tuple[RandomVariable, RandomVariable]:
    """Non-negative f, g both increasing or both decreasing along the grid."""
    f = np.sort(rng.uniform(0.0, 1.0, size=n))
    g = np.sort(rng.uniform(0.0, 1.0, size=n))
    if rng.random() < 0.5:
        f, g = f[::-1], g[::-1]
    return RandomVariable(f), RandomVariable(g)


def random_aligned_pair(n: int, rng: np.random.Generator) -> Tuple[RandomVariable, RandomVariable]:
    """
    f, g sorted the same way, then shuffled by one common permutation; f, g
    and fg then share an order.

    Half of the draws are non-negative. The other half let one factor change
    sign; the other factor is then non-negative and constant on the atoms
    where the first is negative, which keeps fg descending.
    """
    mixed = rng.random() < 0.5
    f = np.sort(rng.uniform(-1.0 if mixed else 0.0, 1.0, size=n))[::-1]
    g = np.sort(rng.uniform(0.0, 1.0, size=n))[::-1]
    if mixed:
        negative = np.flatnonzero(f < 0)
        if negative.size:
            g[negative] = g[negative[0]]
        if rng.random() < 0.5:
            f, g = g, f
    permutation = rng.permutation(n)
    return RandomVariable(f[permutation]), RandomVariable(g[permutation])


def random_invertible(n: int, rng: np.random.Generator, floor: float = 0.05) -> RandomVariable:
    """Real values with floor <= |f_i| <= 1."""
    magnitude = rng.uniform(floor, 1.0, size=n)
    signs = rng.choice([-1.0, 1.0], size=n)
    return RandomVariable(signs * magnitude)


def random_rational_measure(n: int, rng: np.random.Generator, max_count: int = 6) -> DiscreteMeasure:
    """Weights r_i / m with integer counts 0 <= r_i <= max_count, at least one positive."""
    counts = rng.integers(0, max_count + 1, size=n)
    if counts.sum() == 0:
        counts[rng.integers(n)] = 1
    total = int(counts.sum())
    return DiscreteMeasure(np.array([Fraction(int(c), total) for c in counts], dtype=object))
