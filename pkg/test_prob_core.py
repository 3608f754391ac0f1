#!/usr/bin/env python3
"""
Tests for discrete measures, random variables and centered moments
"""

import math
from fractions import Fraction

import numpy as np
import pytest

from leibniz.errors import (
    DimensionMismatchError,
    NonInvertibleError,
    PreconditionError,
    UnsupportedExponentError,
)
from leibniz.prob_core import (
    DiscreteMeasure,
    PExponent,
    RandomVariable,
    centered_moment,
    centered_moment_power,
    constant,
    expectation,
    format_scalar,
    format_vector,
    p_norm,
    parse_scalar,
    sup_norm,
)
from leibniz.sampling import random_complex, random_rational_measure, random_real, simplex_weights


def exact(*values):
    return RandomVariable([Fraction(v) for v in values])


THREE_POINT = DiscreteMeasure([Fraction(1, 8), Fraction(3, 4), Fraction(1, 8)])


def test_expectation_on_three_point_space():
    assert expectation(exact(1, 0, -1), THREE_POINT) == 0
    assert expectation(exact(1, 1, -1), THREE_POINT) == Fraction(3, 4)


def test_centered_moment_exact_values():
    n = 5
    f = exact(1, 0, 0, 0, -1)
    assert centered_moment(f, DiscreteMeasure.uniform(n, exact=True), 1) == Fraction(2, 5)
    assert centered_moment(exact(1, 0, -1), THREE_POINT, 1) == Fraction(1, 4)


def test_sup_norm():
    assert sup_norm(exact(1, 0, 0, 0, -1)) == 1
    assert sup_norm(RandomVariable([3j, -4.0])) == pytest.approx(4.0)


def test_sup_norm_exponent_ignores_null_atoms():
    mu = DiscreteMeasure([0.5, 0.5, 0.0])
    assert p_norm(RandomVariable([1.0, 2.0, 5.0]), mu, math.inf) == 2.0


def test_constant_has_zero_moment():
    mu = DiscreteMeasure.uniform(4, exact=True)
    c = constant(Fraction(7, 3), 4)
    for p in (1, 2, "inf"):
        assert centered_moment(c, mu, p) == 0


def test_exact_second_moment_power():
    mu = DiscreteMeasure.uniform(2, exact=True)
    assert centered_moment_power(exact(1, -1), mu, 2) == 1
    assert centered_moment(exact(1, -1), mu, 2) == pytest.approx(1.0)


def test_float_matches_exact():
    rng = np.random.default_rng(3)
    values = rng.integers(-9, 10, size=6)
    mu = DiscreteMeasure.uniform(6)
    f = RandomVariable(values.astype(float))
    exact_value = centered_moment(f.to_exact(), DiscreteMeasure.uniform(6, exact=True), 1)
    assert centered_moment(f, mu, 1) == pytest.approx(float(exact_value), abs=1e-12)


@pytest.mark.parametrize("text,expected", [
    ("1", 1.0),
    ("1.5", 1.5),
    ("inf", math.inf),
    ("Infinity", math.inf),
])
def test_exponent_parse(text, expected):
    assert PExponent.parse(text).value == expected


def test_exponent_rules():
    with pytest.raises(UnsupportedExponentError):
        PExponent(0.5)
    with pytest.raises(UnsupportedExponentError):
        PExponent.parse("two")
    assert PExponent(2).conjugate().value == 2
    assert PExponent(1).conjugate().is_infinite
    assert PExponent(math.inf).conjugate().value == 1
    assert str(PExponent(3)) == "3"
    assert str(PExponent(1.5)) == "1.5"
    assert str(PExponent.parse("inf")) == "inf"


def test_measure_validation():
    with pytest.raises(PreconditionError):
        DiscreteMeasure([0.5, 0.6])
    with pytest.raises(PreconditionError):
        DiscreteMeasure([1.5, -0.5])
    with pytest.raises(PreconditionError):
        DiscreteMeasure([Fraction(1, 3), Fraction(1, 3)])
    with pytest.raises(PreconditionError):
        DiscreteMeasure.uniform(0)


def test_measure_helpers():
    assert THREE_POINT.is_exact
    assert THREE_POINT.common_denominator() == 8
    assert not THREE_POINT.is_uniform()
    assert DiscreteMeasure.uniform(3, exact=True).is_uniform()
    assert list(DiscreteMeasure([0.5, 0.0, 0.5]).support()) == [True, False, True]
    floats = THREE_POINT.to_float()
    assert floats.backend == "float"
    assert floats.to_exact().weights.tolist() == THREE_POINT.weights.tolist()


def test_dimension_mismatch():
    with pytest.raises(DimensionMismatchError):
        expectation(RandomVariable([1.0, 2.0]), DiscreteMeasure.uniform(3))
    with pytest.raises(DimensionMismatchError):
        RandomVariable([1.0, 2.0]) * RandomVariable([1.0])


def test_reciprocal():
    assert RandomVariable([2.0, -4.0]).reciprocal().values.tolist() == [0.5, -0.25]
    assert exact(2, 1).reciprocal().values.tolist() == [Fraction(1, 2), Fraction(1)]
    with pytest.raises(NonInvertibleError):
        RandomVariable([1.0, 0.0]).reciprocal()


def test_scalar_fields():
    z = RandomVariable([1j, 1.0])
    assert not z.is_real
    with pytest.raises(PreconditionError):
        z.require_real()
    with pytest.raises(PreconditionError):
        RandomVariable([1j], "real")
    assert RandomVariable([1.0, 2.0]).scaled(1j).scalar_field == "complex"
    assert (RandomVariable([1.0]) * RandomVariable([2.0])).is_real


def test_precise_backend():
    f = exact(1, 0, -1).to_precise()
    assert f.backend == "precise"
    value = centered_moment(f, THREE_POINT.to_precise(), 3)
    assert float(value) == pytest.approx(0.25 ** (1 / 3))


@pytest.mark.parametrize("value,text", [
    (Fraction(3, 8), "3/8"),
    (Fraction(-1, 4), "-1/4"),
    (0.1, "0.1"),
    (math.inf, "inf"),
    (True, "true"),
])
def test_format_scalar(value, text):
    assert format_scalar(value) == text


def test_parse_scalar():
    assert parse_scalar("3/8") == Fraction(3, 8)
    assert parse_scalar("0.1") == 0.1
    assert parse_scalar("(1+2j)") == 1 + 2j
    assert format_vector([Fraction(1, 2), 0.25]) == ["1/2", "0.25"]


SEEDED_P = [1, 1.5, 2, 3, math.inf]


def _random_instances(seed, count=25):
    rng = np.random.default_rng(seed)
    for _ in range(count):
        n = int(rng.integers(1, 7))
        yield rng, simplex_weights(n, rng), random_real(n, rng)


@pytest.mark.parametrize("p", SEEDED_P)
def test_moment_shift_invariance(p):
    for rng, mu, f in _random_instances(21):
        c = float(rng.uniform(-3.0, 3.0))
        assert centered_moment(f.shifted(c), mu, p) == pytest.approx(centered_moment(f, mu, p), abs=1e-12)


@pytest.mark.parametrize("p", SEEDED_P)
def test_moment_absolute_homogeneity(p):
    for rng, mu, f in _random_instances(22):
        alpha = float(rng.uniform(-3.0, 3.0))
        assert centered_moment(f.scaled(alpha), mu, p) == pytest.approx(abs(alpha) * centered_moment(f, mu, p),
                                                                        abs=1e-12)
        g = random_complex(mu.n, rng)
        beta = complex(rng.standard_normal(), rng.standard_normal())
        assert centered_moment(g.scaled(beta), mu, p) == pytest.approx(abs(beta) * centered_moment(g, mu, p),
                                                                       rel=1e-9, abs=1e-12)


def test_moments_increase_with_p():
    grid = [PExponent.coerce(p) for p in SEEDED_P]
    for _, mu, f in _random_instances(23, count=50):
        moments = [centered_moment(f, mu, p) for p in grid]
        for lower, higher in zip(moments, moments[1:]):
            assert lower <= higher + 1e-12


@pytest.mark.parametrize("p", SEEDED_P)
def test_moment_below_twice_sup_norm(p):
    for _, mu, f in _random_instances(24):
        assert centered_moment(f, mu, p) <= 2 * sup_norm(f) + 1e-12


def test_exact_moment_properties():
    rng = np.random.default_rng(25)
    for _ in range(25):
        n = int(rng.integers(1, 6))
        mu = random_rational_measure(n, rng)
        f = RandomVariable(np.array([Fraction(int(v), 4) for v in rng.integers(-8, 9, size=n)], dtype=object))
        c = Fraction(int(rng.integers(-9, 10)), 3)
        alpha = Fraction(int(rng.integers(-9, 10)), 5)
        for p in (1, math.inf):
            sigma = centered_moment(f, mu, p)
            assert centered_moment(f.shifted(c), mu, p) == sigma
            assert centered_moment(f.scaled(alpha), mu, p) == abs(alpha) * sigma
            assert sigma <= 2 * sup_norm(f)
        square = centered_moment_power(f, mu, 2)
        assert centered_moment_power(f.shifted(c), mu, 2) == square
        assert centered_moment_power(f.scaled(alpha), mu, 2) == alpha * alpha * square
        # sigma_1 <= sigma_2 <= sigma_inf, compared through squares
        assert centered_moment(f, mu, 1) ** 2 <= square <= centered_moment(f, mu, math.inf) ** 2
