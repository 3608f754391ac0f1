#!/usr/bin/env python3
"""
Tests for the norm of the mean-centering operator I - P
"""

import math
from fractions import Fraction

import numpy as np
import pytest

from leibniz.errors import UnsupportedExponentError
from leibniz.prob_core import DiscreteMeasure, PExponent
from leibniz.projections import (
    DEFAULT_P_GRID,
    franchetti_norm,
    interpolation_bound,
    measure_exact_norm,
    numeric_operator_p_norm,
    projection_table,
    uniform_exact_norm,
)


def test_uniform_exact_norm():
    assert uniform_exact_norm(3, 1, exact=True) == Fraction(4, 3)
    assert uniform_exact_norm(3, "inf", exact=True) == Fraction(4, 3)
    assert uniform_exact_norm(1, 1) == 0
    assert uniform_exact_norm(5, 2) == 1
    with pytest.raises(UnsupportedExponentError):
        uniform_exact_norm(3, 1.5)


def test_measure_exact_norm():
    mu = DiscreteMeasure([Fraction(1, 8), Fraction(3, 4), Fraction(1, 8)])
    assert measure_exact_norm(mu, 1) == Fraction(7, 4)
    assert measure_exact_norm(mu, 2) == 1
    assert measure_exact_norm(DiscreteMeasure([1.0, 0.0]), 1) == 0
    assert measure_exact_norm(DiscreteMeasure.uniform(4), math.inf) == pytest.approx(1.5)


@pytest.mark.parametrize("n,p,expected", [
    (4, 1, 1.5),
    (4, math.inf, 1.5),
    (2, 2, 1.0),
    (7, 1, 2 - 2 / 7),
    (10, 2, 1.0),
])
def test_numeric_norm_matches_closed_form(n, p, expected):
    estimate = numeric_operator_p_norm(n, p, budget=2000, seed=1)
    assert estimate.value == pytest.approx(expected, abs=1e-6)
    assert estimate.exact_value == pytest.approx(expected)
    assert estimate.evaluations <= 2000


def test_numeric_norm_single_atom():
    estimate = numeric_operator_p_norm(1, 3, budget=100)
    assert estimate.value == 0
    assert estimate.exact_value is None


def test_numeric_norm_is_a_lower_bound():
    p = PExponent(3)
    estimate = numeric_operator_p_norm(5, p, budget=3000, seed=2)
    assert 1.0 - 1e-9 <= estimate.value <= interpolation_bound(p).derived + 1e-9
    assert np.abs(estimate.witness).max() == pytest.approx(1.0)
    data = estimate.to_dict()
    assert data["exact_value"] is None
    assert len(data["witness"]) == 5


def test_numeric_norm_on_weighted_space():
    mu = DiscreteMeasure([0.1, 0.6, 0.3])
    estimate = numeric_operator_p_norm(3, 1, budget=1500, mu=mu)
    assert estimate.value == pytest.approx(2 * (1 - 0.1), abs=1e-6)


def test_franchetti_at_two():
    result = franchetti_norm(2)
    assert result.value == pytest.approx(1.0, abs=1e-9)
    assert not result.limit


@pytest.mark.parametrize("p", [1, math.inf])
def test_franchetti_limits(p):
    result = franchetti_norm(p)
    assert result.limit
    assert result.value == 2.0


def test_franchetti_near_one():
    assert franchetti_norm(1.0001).value == pytest.approx(2.0, abs=2e-3)


@pytest.mark.parametrize("p", [1.5, 4, 1.1, 8])
def test_franchetti_conjugate_symmetry(p):
    p = PExponent(p)
    assert franchetti_norm(p).value == pytest.approx(franchetti_norm(p.conjugate()).value, abs=1e-9)


@pytest.mark.parametrize("token", DEFAULT_P_GRID)
def test_franchetti_below_derived_bound(token):
    p = PExponent.parse(token)
    value = franchetti_norm(p).value
    assert 1.0 - 1e-12 <= value <= 2.0
    assert value <= interpolation_bound(p).derived + 1e-9


def test_franchetti_against_dense_grid():
    p, q = 4.0, 4.0 / 3.0
    x = np.linspace(0.0, 1.0, 200001)
    dense = ((x ** (p - 1) + (1 - x) ** (p - 1)) ** (1 / p)
             * (x ** (q - 1) + (1 - x) ** (q - 1)) ** (1 / q)).max()
    value = franchetti_norm(p).value
    assert value >= dense - 1e-12
    assert value == pytest.approx(dense, abs=1e-6)
    assert 1.0 < value < 2.0


def test_interpolation_bounds():
    at_two = interpolation_bound(2)
    assert at_two.printed == pytest.approx(2 ** 0.75)
    assert at_two.derived == pytest.approx(1.0)
    at_one = interpolation_bound(1)
    assert at_one.printed == pytest.approx(2 ** 0.5)
    assert at_one.derived == pytest.approx(2.0)
    assert interpolation_bound("inf").derived == pytest.approx(2.0)


def test_projection_table():
    table = projection_table(("1", "2", "3"), n_values=(2, 3), grid=200)
    assert list(table.columns) == ["p", "franchetti", "printed_bound", "derived_bound", "uniform_n_values"]
    assert table["p"].tolist() == ["1", "2", "3"]
    assert table.loc[0, "uniform_n_values"] == "n=2: 1/1, n=3: 4/3"
    assert table.loc[1, "uniform_n_values"] == "n=2: 1/1, n=3: 1/1"
    assert table.loc[2, "uniform_n_values"] == "-"
