"""
Defect functionals for the scalar Leibniz-type inequalities.

Every inequality has the shape

    c_0 ||h_0||_p  <=  sum_j c_j ||k_j||_p

with weighted norms under one measure. A defect is left side minus right side;
a defect <= tolerance means the inequality holds on the instance.
"""

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .errors import PreconditionError, UnsupportedExponentError
from .prob_core import (
    DiscreteMeasure,
    PExponent,
    RandomVariable,
    Scalar,
    _check_dims,
    centered,
    expectation,
    format_scalar,
    format_vector,
    p_norm,
    p_norm_power,
    sup_norm,
)

DEFAULT_TOLERANCE = 1e-9

HOLDS = "holds"
VIOLATED = "violated"

# (coefficient, vector); the term is coefficient * ||vector||_p
Term = Tuple[Scalar, RandomVariable]


@dataclass(frozen=True, eq=False)
class DefectReport:
    """One inequality evaluated on one instance."""

    name: str
    lhs: Scalar
    rhs: Scalar
    tolerance: Scalar
    inputs: Dict[str, object] = field(default_factory=dict)
    exact: bool = False
    # exact sign of lhs - rhs when the sides themselves are irrational (p = 2)
    certified_sign: Optional[int] = None

    @property
    def defect(self) -> Scalar:
        return self.lhs - self.rhs

    @property
    def violated(self) -> bool:
        """
        defect > tolerance. With a certified sign a zero tolerance defers to the
        sign alone; a positive one also needs the rounded defect to exceed it.
        """
        if self.certified_sign is not None:
            if self.certified_sign <= 0:
                return False
            return self.tolerance == 0 or self.defect > self.tolerance
        return self.defect > self.tolerance

    @property
    def verdict(self) -> str:
        return VIOLATED if self.violated else HOLDS

    def to_dict(self) -> Dict[str, object]:
        data = {
            "name": self.name,
            "lhs": format_scalar(self.lhs),
            "rhs": format_scalar(self.rhs),
            "defect": format_scalar(self.defect),
            "verdict": self.verdict,
            "tolerance": format_scalar(self.tolerance),
            "exact": self.exact,
            "inputs": self.inputs,
        }
        if self.certified_sign is not None:
            data["certified_sign"] = self.certified_sign
        return data


def sqrt_sum_sign(lhs_square: Fraction, rhs_squares: Sequence[Fraction]) -> int:
    """
    Exact sign of sqrt(L) - sum_j sqrt(R_j) for non-negative rationals, at most two R_j.
    """
    if len(rhs_squares) == 0:
        return (lhs_square > 0) - (lhs_square < 0)
    if len(rhs_squares) == 1:
        diff = lhs_square - rhs_squares[0]
        return (diff > 0) - (diff < 0)
    if len(rhs_squares) != 2:
        raise PreconditionError("exact square-root comparison supports at most two right-hand terms")
    a, b = rhs_squares
    # sqrt(L) <= sqrt(a) + sqrt(b)  <=>  L - a - b <= 2 sqrt(ab)
    t = lhs_square - a - b
    if t < 0:
        return -1
    if t == 0:
        return 0 if a * b == 0 else -1
    diff = t * t - 4 * a * b
    return (diff > 0) - (diff < 0)


def _is_exact_coefficient(c) -> bool:
    return isinstance(c, (Fraction, int)) and not isinstance(c, bool)


def _evaluate(name: str, mu: DiscreteMeasure, p: PExponent, lhs: List[Term], rhs: List[Term],
              inputs: Dict[str, object], tolerance: Optional[Scalar]) -> DefectReport:
    exact = (mu.is_exact
             and all(vec.backend == "exact" for _, vec in lhs + rhs)
             and all(_is_exact_coefficient(c) for c, _ in lhs + rhs))
    if exact and not (p.is_infinite or p.value in (1, 2)):
        raise UnsupportedExponentError(f"exact mode supports p in {{1, 2, inf}}, got p = {p}")
    if tolerance is None:
        tolerance = Fraction(0) if exact else DEFAULT_TOLERANCE

    if exact and p.value == 2:
        lhs_squares = [c * c * p_norm_power(vec, mu, 2) for c, vec in lhs]
        rhs_squares = [c * c * p_norm_power(vec, mu, 2) for c, vec in rhs]
        sign = sqrt_sum_sign(sum(lhs_squares, Fraction(0)), rhs_squares)
        lhs_value = sum(math.sqrt(s) for s in lhs_squares)
        rhs_value = sum(math.sqrt(s) for s in rhs_squares)
        return DefectReport(name, lhs_value, rhs_value, tolerance, inputs, True, sign)

    lhs_value = sum((c * p_norm(vec, mu, p) for c, vec in lhs), Fraction(0) if exact else 0.0)
    rhs_value = sum((c * p_norm(vec, mu, p) for c, vec in rhs), Fraction(0) if exact else 0.0)
    return DefectReport(name, lhs_value, rhs_value, tolerance, inputs, exact)


def _inputs(mu: DiscreteMeasure, p: PExponent, **variables) -> Dict[str, object]:
    data = {name: format_vector(var.values) for name, var in variables.items()}
    data["weights"] = format_vector(mu.weights)
    data["p"] = str(p)
    return data


def _check_all(mu: DiscreteMeasure, *variables: RandomVariable):
    for var in variables:
        _check_dims(var, mu)


def _leibniz_terms(f: RandomVariable, g: RandomVariable, mu: DiscreteMeasure):
    lhs = [(1, centered(f * g, mu))]
    rhs = [(sup_norm(f), centered(g, mu)), (sup_norm(g), centered(f, mu))]
    return lhs, rhs


def leibniz_defect(f: RandomVariable, g: RandomVariable, mu: DiscreteMeasure, p,
                   tolerance: Optional[Scalar] = None) -> DefectReport:
    """sigma_p(fg) <= ||f||_inf sigma_p(g) + ||g||_inf sigma_p(f)."""
    p = PExponent.coerce(p)
    _check_all(mu, f, g)
    lhs, rhs = _leibniz_terms(f, g, mu)
    return _evaluate("leibniz", mu, p, lhs, rhs, _inputs(mu, p, f=f, g=g), tolerance)


def strong_leibniz_defect(f: RandomVariable, mu: DiscreteMeasure, p,
                          tolerance: Optional[Scalar] = None) -> DefectReport:
    """sigma_p(1/f) <= ||1/f||_inf^2 sigma_p(f)."""
    p = PExponent.coerce(p)
    _check_all(mu, f)
    inverse = f.reciprocal()
    inverse_sup = sup_norm(inverse)
    lhs = [(1, centered(inverse, mu))]
    rhs = [(inverse_sup * inverse_sup, centered(f, mu))]
    return _evaluate("strong_leibniz", mu, p, lhs, rhs, _inputs(mu, p, f=f), tolerance)


def auxiliary_defect(f: RandomVariable, x: RandomVariable, mu: DiscreteMeasure, p,
                     tolerance: Optional[Scalar] = None) -> DefectReport:
    """||f E x - E(f x)||_p <= ||x||_inf sigma_p(f), for real f."""
    p = PExponent.coerce(p)
    f.require_real("the auxiliary inequality")
    _check_all(mu, f, x)
    h = f.scaled(expectation(x, mu)).shifted(-expectation(f * x, mu))
    lhs = [(1, h)]
    rhs = [(sup_norm(x), centered(f, mu))]
    return _evaluate("auxiliary", mu, p, lhs, rhs, _inputs(mu, p, f=f, x=x), tolerance)


def _check_op_norm(op_norm: Scalar):
    if op_norm < 1:
        raise PreconditionError(f"||I-P||_p is at least 1 for a non-trivial space, got {op_norm}")


def rough_leibniz_defect(f: RandomVariable, g: RandomVariable, mu: DiscreteMeasure, p, op_norm: Scalar,
                         tolerance: Optional[Scalar] = None) -> DefectReport:
    """(2 / (||I-P||_p + 1)) sigma_p(fg) <= ||g||_inf sigma_p(f) + ||f||_inf sigma_p(g)."""
    p = PExponent.coerce(p)
    _check_op_norm(op_norm)
    _check_all(mu, f, g)
    _, rhs = _leibniz_terms(f, g, mu)
    lhs = [(2 / (op_norm + 1), centered(f * g, mu))]
    inputs = _inputs(mu, p, f=f, g=g)
    inputs["op_norm"] = format_scalar(op_norm)
    return _evaluate("rough_leibniz", mu, p, lhs, rhs, inputs, tolerance)


def rough_one_sided_defect(f: RandomVariable, g: RandomVariable, mu: DiscreteMeasure, p, op_norm: Scalar,
                           tolerance: Optional[Scalar] = None) -> DefectReport:
    """sigma_p(fg) <= ||I-P||_p ||f||_inf sigma_p(g) + ||g||_inf sigma_p(f)."""
    p = PExponent.coerce(p)
    _check_op_norm(op_norm)
    _check_all(mu, f, g)
    lhs = [(1, centered(f * g, mu))]
    rhs = [(op_norm * sup_norm(f), centered(g, mu)), (sup_norm(g), centered(f, mu))]
    inputs = _inputs(mu, p, f=f, g=g)
    inputs["op_norm"] = format_scalar(op_norm)
    return _evaluate("rough_one_sided", mu, p, lhs, rhs, inputs, tolerance)


def renorm_inverse_defects(f: RandomVariable, mu: DiscreteMeasure, p, op_norm: Scalar,
                           tolerance: Optional[Scalar] = None) -> Tuple[DefectReport, DefectReport]:
    """
    The two inverse estimates obtained through the renormed space:

        sigma_p(1/f) <= (1 + ||I-P||_p)^2 ||1/f||_inf^2 sigma_p(f)
        |E f| sigma_p(1/f) <= ||I-P||_p ||1/f||_inf sigma_p(f)
    """
    p = PExponent.coerce(p)
    _check_op_norm(op_norm)
    _check_all(mu, f)
    inverse = f.reciprocal()
    inverse_sup = sup_norm(inverse)
    inputs = _inputs(mu, p, f=f)
    inputs["op_norm"] = format_scalar(op_norm)

    factor = (1 + op_norm) * inverse_sup
    first = _evaluate("renorm_inverse", mu, p,
                      [(1, centered(inverse, mu))],
                      [(factor * factor, centered(f, mu))],
                      inputs, tolerance)
    second = _evaluate("renorm_inverse_mean", mu, p,
                       [(abs(expectation(f, mu)), centered(inverse, mu))],
                       [(op_norm * inverse_sup, centered(f, mu))],
                       inputs, tolerance)
    return first, second


def square_corollary_defect(f: RandomVariable, mu: DiscreteMeasure, p,
                            tolerance: Optional[Scalar] = None) -> DefectReport:
    """sigma_p(f^2) <= 2 ||f||_inf sigma_p(f) for non-negative f."""
    p = PExponent.coerce(p)
    f.require_real("the square corollary")
    _check_all(mu, f)
    if any(v < 0 for v in f.values):
        raise PreconditionError("the square corollary needs a non-negative random variable")
    lhs = [(1, centered(f * f, mu))]
    rhs = [(2 * sup_norm(f), centered(f, mu))]
    return _evaluate("square_corollary", mu, p, lhs, rhs, _inputs(mu, p, f=f), tolerance)


def monotone_directions(values: np.ndarray) -> set:
    """Directions ("increasing", "decreasing") in which a sequence is monotone."""
    steps = [b - a for a, b in zip(values[:-1], values[1:])]
    directions = set()
    if all(s >= 0 for s in steps):
        directions.add("increasing")
    if all(s <= 0 for s in steps):
        directions.add("decreasing")
    return directions


def monotone_corollary_defect(f: RandomVariable, g: RandomVariable, mu: DiscreteMeasure, p,
                              grid: Optional[Sequence[float]] = None,
                              tolerance: Optional[Scalar] = None) -> DefectReport:
    """
    Leibniz defect for non-negative step functions on a grid of [0, 1] that are
    monotone in the same direction; coordinates follow the grid order.
    """
    p = PExponent.coerce(p)
    f.require_real("the monotone corollary")
    g.require_real("the monotone corollary")
    _check_all(mu, f, g)
    if any(v < 0 for v in f.values) or any(v < 0 for v in g.values):
        raise PreconditionError("the monotone corollary needs non-negative functions")
    if not monotone_directions(f.values) & monotone_directions(g.values):
        raise PreconditionError("f and g are not monotone in a common direction")
    inputs = _inputs(mu, p, f=f, g=g)
    if grid is not None:
        points = np.asarray(grid, dtype=float)
        if points.size != mu.n or np.any(np.diff(points) <= 0) or points[0] < 0 or points[-1] > 1:
            raise PreconditionError("grid must be strictly increasing in [0, 1], one point per atom")
        inputs["grid"] = format_vector(points)
    lhs, rhs = _leibniz_terms(f, g, mu)
    return _evaluate("monotone_corollary", mu, p, lhs, rhs, inputs, tolerance)
