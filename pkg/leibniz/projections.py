"""
Norms of the mean-centering operator I - P, where P f = (E f) 1.

Closed forms exist for p in {1, 2, inf}; for other p the norm is estimated
from below by a witness search, and on the uniform two-point model it is given
by a one-dimensional maximization.
"""

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence

import numpy as np
import pandas as pd

from .errors import PreconditionError, UnsupportedExponentError
from .optimize import golden_section_max, pattern_search
from .prob_core import (
    DiscreteMeasure,
    PExponent,
    RandomVariable,
    Scalar,
    centered,
    format_scalar,
    p_norm,
)

logger = logging.getLogger(__name__)

CLOSED_FORM_EXPONENTS = (1.0, 2.0, math.inf)

DEFAULT_P_GRID = ("1.1", "1.25", "1.5", "2", "3", "4", "8")


def _require_closed_form(p: PExponent):
    if p.value not in CLOSED_FORM_EXPONENTS:
        raise UnsupportedExponentError(f"closed form known only for p in {{1, 2, inf}}, got p = {p}")


def uniform_exact_norm(n: int, p, exact: bool = False) -> Scalar:
    """||I-P||_p on the uniform space with n atoms: 2 - 2/n for p in {1, inf}, 1 for p = 2."""
    p = PExponent.coerce(p)
    _require_closed_form(p)
    if n < 1:
        raise PreconditionError(f"n must be >= 1, got {n}")
    one = Fraction(1) if exact else 1.0
    if n == 1:
        return 0 * one
    if p.value == 2:
        return one
    return 2 * one - 2 * one / n


def measure_exact_norm(mu: DiscreteMeasure, p) -> Scalar:
    """
    ||I-P||_p for an arbitrary discrete measure: 2(1 - w_min) for p in {1, inf},
    where w_min is the smallest positive weight, and 1 for p = 2. A measure with
    a single charged atom gives 0.
    """
    p = PExponent.coerce(p)
    _require_closed_form(p)
    positive = [w for w in mu.weights if w > 0]
    one = Fraction(1) if mu.is_exact else 1.0
    if len(positive) == 1:
        return 0 * one
    if p.value == 2:
        return one
    return 2 * (one - min(positive))


@dataclass
class OperatorNormEstimate:
    """Witness-based lower bound for ||I-P||_p."""

    value: float
    witness: np.ndarray
    exact_value: Optional[Scalar]
    evaluations: int

    def to_dict(self):
        return {
            "value": format_scalar(self.value),
            "witness": [format_scalar(v) for v in self.witness],
            "exact_value": None if self.exact_value is None else format_scalar(self.exact_value),
            "evaluations": self.evaluations,
        }


def _operator_ratio(x: np.ndarray, mu: DiscreteMeasure, p: PExponent) -> float:
    f = RandomVariable(x)
    denominator = p_norm(f, mu, p)
    if denominator <= 0:
        return 0.0
    return float(p_norm(centered(f, mu), mu, p) / denominator)


def _structured_candidates(weights: np.ndarray) -> List[np.ndarray]:
    """Basis vectors, single-sign-flip vectors and mean-zero dipoles."""
    k = weights.size
    candidates = []
    for j in range(k):
        e = np.zeros(k)
        e[j] = 1.0
        candidates.append(e)
        flip = np.ones(k)
        flip[j] = -1.0
        candidates.append(flip)
    for i in range(k):
        for j in range(i + 1, k):
            dipole = np.zeros(k)
            dipole[i] = weights[j]
            dipole[j] = -weights[i]
            candidates.append(dipole)
    return candidates


def _normalize_sup(x: np.ndarray) -> np.ndarray:
    scale = np.abs(x).max()
    return x / scale if scale > 0 else x


def numeric_operator_p_norm(n: int, p, budget: int, seed: int = 0,
                            mu: Optional[DiscreteMeasure] = None) -> OperatorNormEstimate:
    """
    Lower bound for max ||(I-P)x||_p / ||x||_p by multi-start ascent.

    Structured candidates are evaluated first; the best of them seeds a pattern
    search that spends the rest of ``budget``. Atoms of zero weight are
    irrelevant to both norms and are left at 0 in the witness.
    """
    p = PExponent.coerce(p)
    if mu is None:
        mu = DiscreteMeasure.uniform(n)
    elif mu.n != n:
        raise PreconditionError(f"measure has {mu.n} atoms, expected {n}")
    if budget < 1:
        raise PreconditionError("budget must be positive")
    mu = mu.to_float()
    exact_value = measure_exact_norm(mu, p) if p.value in CLOSED_FORM_EXPONENTS else None

    support = mu.support()
    weights = np.asarray(mu.weights, dtype=float)[support]
    witness = np.zeros(n)
    if weights.size == 1:
        witness[support] = 1.0
        return OperatorNormEstimate(0.0, witness, exact_value, 1)

    local = DiscreteMeasure(weights / weights.sum())

    def objective(x):
        return _operator_ratio(x, local, p)

    best_x, best_value, evaluations = None, -1.0, 0
    for candidate in _structured_candidates(weights):
        if evaluations >= budget:
            break
        value = objective(candidate)
        evaluations += 1
        if value > best_value:
            best_x, best_value = candidate, value

    rng = np.random.default_rng(seed)
    while evaluations < budget:
        start = best_x if evaluations < budget // 2 else rng.uniform(-1.0, 1.0, weights.size)
        result = pattern_search(objective, start, budget=budget - evaluations, step=0.25,
                                project=_normalize_sup, rng=rng)
        evaluations += result.evaluations
        if result.value > best_value:
            best_x, best_value = result.x, result.value

    witness[support] = _normalize_sup(best_x)
    logger.debug("||I-P||_%s on %d atoms >= %.12g after %d evaluations", p, n, best_value, evaluations)
    return OperatorNormEstimate(best_value, witness, exact_value, evaluations)


@dataclass
class FranchettiResult:
    value: float
    argmax: float
    limit: bool = False


def _franchetti_expression(x: float, p: float, q: float) -> float:
    first = (x ** (p - 1) + (1 - x) ** (p - 1)) ** (1 / p)
    second = (x ** (q - 1) + (1 - x) ** (q - 1)) ** (1 / q)
    return first * second


def franchetti_norm(p, grid: int = 2000) -> FranchettiResult:
    """
    Maximum over [0, 1] of

        (x^(p-1) + (1-x)^(p-1))^(1/p) * (x^(q-1) + (1-x)^(q-1))^(1/q)

    with 1/p + 1/q = 1. The expression is symmetric about 1/2, so only [0, 1/2]
    is searched: a linear grid plus a geometric grid towards 0 locate the
    maximum, golden section refines it. p = 1 and p = inf return the limit 2.
    """
    p = PExponent.coerce(p)
    if grid < 2:
        raise PreconditionError(f"grid must have at least 2 points, got {grid}")
    if p.value == 1 or p.is_infinite:
        return FranchettiResult(2.0, 0.0, limit=True)
    q = p.conjugate().value
    pv = p.value

    points = np.union1d(np.linspace(0.0, 0.5, grid), np.geomspace(1e-16, 0.5, grid))
    values = np.array([_franchetti_expression(x, pv, q) for x in points])
    best = int(np.argmax(values))
    lower = points[max(best - 1, 0)]
    upper = points[min(best + 1, points.size - 1)]
    argmax, value = golden_section_max(lambda x: _franchetti_expression(x, pv, q), lower, upper,
                                       tol=1e-15 * max(1.0, upper))
    if values[best] > value:
        argmax, value = points[best], values[best]
    return FranchettiResult(float(value), float(argmax))


@dataclass
class InterpolationBounds:
    printed: float
    derived: float


def interpolation_bound(p) -> InterpolationBounds:
    """
    Riesz-Thorin style upper bounds for ||I-P||_p: the printed exponent
    |1 - 1/(2p)| next to |1 - 2/p|, the interpolation between the endpoint
    values 2 (p = 1, inf) and 1 (p = 2).
    """
    p = PExponent.coerce(p)
    inverse = 0.0 if p.is_infinite else 1.0 / p.value
    return InterpolationBounds(printed=2.0 ** abs(1 - inverse / 2),
                               derived=2.0 ** abs(1 - 2 * inverse))


def _uniform_values(p: PExponent, n_values: Sequence[int]) -> str:
    if p.value not in CLOSED_FORM_EXPONENTS:
        return "-"
    return ", ".join(f"n={n}: {format_scalar(uniform_exact_norm(n, p, exact=True))}" for n in n_values)


def projection_table(p_grid: Sequence = DEFAULT_P_GRID, n_values: Sequence[int] = (2, 3, 4, 5),
                     grid: int = 2000) -> pd.DataFrame:
    """Franchetti values beside both interpolation bounds, one row per p."""
    rows = []
    for token in p_grid:
        p = PExponent.coerce(token)
        bounds = interpolation_bound(p)
        rows.append({
            "p": str(p),
            "franchetti": franchetti_norm(p, grid).value,
            "printed_bound": bounds.printed,
            "derived_bound": bounds.derived,
            "uniform_n_values": _uniform_values(p, n_values),
        })
    return pd.DataFrame(rows, columns=["p", "franchetti", "printed_bound", "derived_bound", "uniform_n_values"])
