#!/usr/bin/env python3
"""
Tests for the scalar defect functionals
"""

import math
from fractions import Fraction

import numpy as np
import pytest

from leibniz.errors import DimensionMismatchError, PreconditionError, UnsupportedExponentError
from leibniz.inequalities import (
    DEFAULT_TOLERANCE,
    DefectReport,
    HOLDS,
    VIOLATED,
    auxiliary_defect,
    leibniz_defect,
    monotone_corollary_defect,
    monotone_directions,
    renorm_inverse_defects,
    rough_leibniz_defect,
    rough_one_sided_defect,
    sqrt_sum_sign,
    square_corollary_defect,
    strong_leibniz_defect,
)
from leibniz.prob_core import DiscreteMeasure, RandomVariable
from leibniz.sampling import random_complex, random_real, simplex_weights


def exact(*values):
    return RandomVariable([Fraction(v) for v in values])


def uniform(n):
    return DiscreteMeasure.uniform(n, exact=True)


THREE_POINT = DiscreteMeasure([Fraction(1, 8), Fraction(3, 4), Fraction(1, 8)])


def test_leibniz_hand_example():
    f = exact(2, 1, 0)
    report = leibniz_defect(f, f, uniform(3), 1)
    assert report.exact
    assert report.lhs == Fraction(14, 9)
    assert report.rhs == Fraction(8, 3)
    assert report.defect == Fraction(-10, 9)
    assert report.verdict == HOLDS
    assert report.tolerance == 0


def test_leibniz_constant_factor_is_tight():
    report = leibniz_defect(exact(1, 1, 1), exact(3, -1, 2), uniform(3), 1)
    assert report.defect == 0
    assert not report.violated


def test_leibniz_constant_product_at_two():
    f = exact(1, -1)
    report = leibniz_defect(f, f, uniform(2), 2)
    assert report.lhs == 0
    assert report.rhs == pytest.approx(2.0)
    assert report.certified_sign == -1
    assert report.defect == pytest.approx(-2.0)


def test_certified_sign_and_tolerance():
    assert DefectReport("demo", 1.5, 1.0, Fraction(0), certified_sign=1).violated
    assert DefectReport("demo", 1.5, 1.0, 0.25, certified_sign=1).violated
    assert not DefectReport("demo", 1.5, 1.0, 1.0, certified_sign=1).violated
    assert not DefectReport("demo", 1.5, 1.0, 0.25, certified_sign=0).violated
    assert not DefectReport("demo", 1.0, 1.5, Fraction(0), certified_sign=-1).violated

    loose = leibniz_defect(exact(1, -1), exact(1, -1), uniform(2), 2, tolerance=Fraction(1, 2))
    assert loose.certified_sign == -1
    assert not loose.violated


def test_strong_leibniz_examples():
    report = strong_leibniz_defect(exact(2, 1), uniform(2), 1)
    assert report.lhs == Fraction(1, 4)
    assert report.rhs == Fraction(1, 2)
    assert report.defect == Fraction(-1, 4)

    tight = strong_leibniz_defect(exact(1, -1), uniform(2), 2)
    assert tight.certified_sign == 0
    assert not tight.violated
    assert tight.defect == pytest.approx(0.0)


def test_strong_leibniz_needs_invertible():
    with pytest.raises(PreconditionError):
        strong_leibniz_defect(exact(1, 0), uniform(2), 1)


@pytest.mark.parametrize("n", [5, 6, 7, 8])
def test_auxiliary_first_counterexample(n):
    f = exact(*([1] + [0] * (n - 2) + [-1]))
    x = exact(*([1] * (n - 1) + [-1]))
    report = auxiliary_defect(f, x, uniform(n), 1)
    assert report.lhs == Fraction(4 * n - 8, n * n)
    assert report.rhs == Fraction(2, n)
    assert report.violated
    assert report.verdict == VIOLATED


def test_auxiliary_second_counterexample():
    report = auxiliary_defect(exact(1, 0, -1), exact(1, 1, -1), THREE_POINT, 1)
    assert report.lhs == Fraction(3, 8)
    assert report.rhs == Fraction(1, 4)
    assert report.defect == Fraction(1, 8)
    data = report.to_dict()
    assert data["lhs"] == "3/8"
    assert data["defect"] == "1/8"
    assert data["verdict"] == VIOLATED
    assert data["inputs"]["weights"] == ["1/8", "3/4", "1/8"]


def test_auxiliary_constant_x():
    report = auxiliary_defect(exact(3, 1, 0, -2), exact(1, 1, 1, 1), uniform(4), 1)
    assert report.defect == 0


def test_auxiliary_rejects_complex_f():
    with pytest.raises(PreconditionError):
        auxiliary_defect(RandomVariable([1j, 1.0]), RandomVariable([1.0, 1.0]), DiscreteMeasure.uniform(2), 1)


def test_dimension_mismatch():
    with pytest.raises(DimensionMismatchError):
        leibniz_defect(RandomVariable([1.0, 2.0]), RandomVariable([1.0, 2.0, 3.0]), DiscreteMeasure.uniform(2), 1)


def test_exact_mode_limited_exponents():
    with pytest.raises(UnsupportedExponentError):
        leibniz_defect(exact(1, 2), exact(2, 1), uniform(2), 1.5)


def test_float_default_tolerance():
    report = leibniz_defect(RandomVariable([1.0, 2.0]), RandomVariable([0.5, 0.0]), DiscreteMeasure.uniform(2), 3)
    assert report.tolerance == DEFAULT_TOLERANCE
    assert not report.exact


@pytest.mark.parametrize("lhs,rhs,sign", [
    (Fraction(9), [Fraction(4), Fraction(1)], 0),
    (Fraction(10), [Fraction(4), Fraction(1)], 1),
    (Fraction(8), [Fraction(4), Fraction(1)], -1),
    (Fraction(2), [Fraction(2)], 0),
    (Fraction(0), [], 0),
    (Fraction(1), [Fraction(0), Fraction(0)], 1),
])
def test_sqrt_sum_sign(lhs, rhs, sign):
    assert sqrt_sum_sign(lhs, rhs) == sign


def test_leibniz_p2_holds_on_random_complex_instances():
    rng = np.random.default_rng(11)
    for _ in range(200):
        mu = simplex_weights(int(rng.integers(2, 7)), rng)
        report = leibniz_defect(random_complex(mu.n, rng), random_complex(mu.n, rng), mu, 2)
        assert report.defect <= 1e-12


def test_sup_norm_inequalities_hold_on_random_real_instances():
    rng = np.random.default_rng(12)
    for _ in range(200):
        mu = simplex_weights(int(rng.integers(2, 7)), rng)
        f, g = random_real(mu.n, rng), random_real(mu.n, rng)
        assert leibniz_defect(f, g, mu, math.inf).defect <= 1e-12
        assert auxiliary_defect(f, random_complex(mu.n, rng), mu, math.inf).defect <= 1e-12


def test_leibniz_symmetry_and_scaling():
    rng = np.random.default_rng(5)
    mu = simplex_weights(5, rng)
    f, g = random_real(5, rng), random_real(5, rng)
    base = leibniz_defect(f, g, mu, 1.5).defect
    assert leibniz_defect(g, f, mu, 1.5).defect == pytest.approx(base, abs=1e-12)
    scaled = leibniz_defect(f.scaled(2.0), g.scaled(-3.0), mu, 1.5).defect
    assert scaled == pytest.approx(6 * base, abs=1e-12)


def test_rough_leibniz_reduces_at_two():
    rng = np.random.default_rng(8)
    mu = simplex_weights(4, rng)
    f, g = random_complex(4, rng), random_complex(4, rng)
    rough = rough_leibniz_defect(f, g, mu, 2, 1.0)
    plain = leibniz_defect(f, g, mu, 2)
    assert rough.defect == pytest.approx(plain.defect, abs=1e-12)
    assert rough.defect <= 1e-12


def test_rough_bounds_on_uniform_space():
    rng = np.random.default_rng(9)
    mu = DiscreteMeasure.uniform(5)
    op_norm = 2 - 2 / 5
    for _ in range(100):
        f, g = random_complex(5, rng), random_complex(5, rng)
        assert rough_leibniz_defect(f, g, mu, 1, op_norm).defect <= 1e-12
        assert rough_one_sided_defect(f, g, mu, 1, op_norm).defect <= 1e-12


def test_rough_rejects_small_operator_norm():
    f = RandomVariable([1.0, 2.0])
    with pytest.raises(PreconditionError):
        rough_leibniz_defect(f, f, DiscreteMeasure.uniform(2), 1, 0.5)


def test_renorm_inverse_hand_example():
    first, second = renorm_inverse_defects(exact(2, 1), uniform(2), 1, Fraction(1))
    assert first.lhs == Fraction(1, 4)
    assert first.rhs == 2
    assert second.lhs == Fraction(3, 8)
    assert second.rhs == Fraction(1, 2)
    assert first.name == "renorm_inverse"
    assert second.name == "renorm_inverse_mean"


def test_square_corollary():
    report = square_corollary_defect(exact(2, 1, 0), uniform(3), 1)
    assert report.lhs == Fraction(14, 9)
    assert report.rhs == Fraction(8, 3)
    with pytest.raises(PreconditionError):
        square_corollary_defect(exact(1, -1), uniform(2), 1)


def test_monotone_corollary():
    f = RandomVariable([0.0, 0.25, 0.5, 1.0])
    report = monotone_corollary_defect(f, f, DiscreteMeasure.uniform(4), 1.5, grid=[0.0, 0.25, 0.5, 1.0])
    assert report.defect <= 0
    assert report.inputs["grid"] == ["0.0", "0.25", "0.5", "1.0"]
    with pytest.raises(PreconditionError):
        monotone_corollary_defect(f, RandomVariable([1.0, 0.5, 0.25, 0.0]), DiscreteMeasure.uniform(4), 1)
    with pytest.raises(PreconditionError):
        monotone_corollary_defect(f, f, DiscreteMeasure.uniform(4), 1, grid=[0.0, 0.5, 0.25, 1.0])


def test_monotone_directions():
    assert monotone_directions(np.array([1.0, 2.0, 2.0])) == {"increasing"}
    assert monotone_directions(np.array([3.0, 1.0])) == {"decreasing"}
    assert monotone_directions(np.array([1.0, 1.0])) == {"increasing", "decreasing"}
    assert monotone_directions(np.array([1.0, 3.0, 2.0])) == set()
