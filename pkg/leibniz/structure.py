"""
Majorization, extreme points of the mean-zero unit ball, and the reduction of
an arbitrary discrete measure to a uniform one.
"""

import itertools
import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, List, Optional, Sequence

import numpy as np

from .errors import EnumerationLimitError, PreconditionError
from .inequalities import DefectReport, auxiliary_defect, leibniz_defect
from .prob_core import (
    DiscreteMeasure,
    PExponent,
    RandomVariable,
    Scalar,
    _check_dims,
    centered,
    centered_moment,
    constant,
    format_scalar,
    p_norm,
    sup_norm,
)

logger = logging.getLogger(__name__)

MAJORIZATION_TOLERANCE = 1e-12
MAX_SIGN_VECTOR_LENGTH = 25
MAX_EXTREME_POINT_ATOMS = 20


@dataclass
class OrderAlignment:
    """A common descending order of f, g and fg, if one exists."""

    permutation: np.ndarray
    aligned: bool


def _nonincreasing(values: Sequence) -> bool:
    return all(a >= b for a, b in zip(values[:-1], values[1:]))


def same_order(f: RandomVariable, g: RandomVariable) -> OrderAlignment:
    """
    Sort by f, break ties by g and then by fg, all descending. Whenever any
    common order exists this one is common too, so one check decides it.
    """
    f.require_real("same_order")
    g.require_real("same_order")
    if f.n != g.n:
        raise PreconditionError(f"cannot align vectors of length {f.n} and {g.n}")
    fv = np.array([float(v) for v in f.values])
    gv = np.array([float(v) for v in g.values])
    permutation = np.lexsort((-(fv * gv), -gv, -fv))
    product = (f * g).values
    aligned = (_nonincreasing(f.values[permutation])
               and _nonincreasing(g.values[permutation])
               and _nonincreasing(product[permutation]))
    return OrderAlignment(permutation=permutation, aligned=aligned)


def majorization_slacks(u: Sequence, v: Sequence) -> List[Scalar]:
    """Descending partial sums of u minus those of v, k = 1..n."""
    if len(u) != len(v):
        raise PreconditionError(f"cannot compare vectors of length {len(u)} and {len(v)}")
    u_sorted = sorted(u, reverse=True)
    v_sorted = sorted(v, reverse=True)
    slacks, u_total, v_total = [], 0, 0
    for a, b in zip(u_sorted, v_sorted):
        u_total += a
        v_total += b
        slacks.append(u_total - v_total)
    return slacks


def majorizes(u: Sequence, v: Sequence, tol: float = MAJORIZATION_TOLERANCE) -> bool:
    """True iff u majorizes v: dominating descending partial sums and equal totals."""
    slacks = majorization_slacks(u, v)
    if not slacks:
        return True
    return all(s >= -tol for s in slacks[:-1]) and abs(slacks[-1]) <= tol


@dataclass
class SchurLeibnizReport:
    defect: DefectReport
    majorized: bool
    slacks: List[Scalar] = field(default_factory=list)

    def to_dict(self):
        data = self.defect.to_dict()
        data["majorized"] = self.majorized
        data["slacks"] = [format_scalar(s) for s in self.slacks]
        return data


def leibniz_majorant(f: RandomVariable, g: RandomVariable, mu: DiscreteMeasure) -> RandomVariable:
    """||f||_inf (g - Eg) + ||g||_inf (f - Ef)."""
    return RandomVariable(sup_norm(f) * centered(g, mu).values + sup_norm(g) * centered(f, mu).values)


def schur_leibniz_verify(f: RandomVariable, g: RandomVariable, n: int, p,
                         tolerance: Optional[Scalar] = None) -> SchurLeibnizReport:
    """
    Leibniz defect on the uniform space for a similarly ordered pair, together
    with the majorization of fg - E(fg) by the Leibniz majorant.
    """
    p = PExponent.coerce(p)
    if f.n != n or g.n != n:
        raise PreconditionError(f"expected vectors of length {n}")
    if not same_order(f, g).aligned:
        raise PreconditionError("f, g and fg do not share a common order")
    exact = f.backend == "exact" and g.backend == "exact"
    mu = DiscreteMeasure.uniform(n, exact=exact)
    report = leibniz_defect(f, g, mu, p, tolerance=tolerance)
    u = leibniz_majorant(f, g, mu).values
    v = centered(f * g, mu).values
    slacks = majorization_slacks(u, v)
    tol = 0 if exact else MAJORIZATION_TOLERANCE
    return SchurLeibnizReport(report, majorizes(u, v, tol), slacks)


def rationalize(mu: DiscreteMeasure, eps: float) -> DiscreteMeasure:
    """
    A measure with rational weights r_i/m, each within eps of mu and summing to 1.

    Weights that are already short fractions are kept; otherwise every weight
    is rounded to a common denominator and the rounding slack goes onto the
    largest atom.
    """
    if eps <= 0:
        raise PreconditionError(f"eps must be positive, got {eps}")
    if mu.is_exact:
        return mu
    weights = [float(w) for w in mu.weights]

    short = [Fraction(w).limit_denominator(math.ceil(1 / eps)) for w in weights]
    if sum(short) == 1 and all(abs(s - w) <= eps for s, w in zip(short, weights)):
        return DiscreteMeasure(np.array(short, dtype=object))

    m = math.ceil((len(weights) + 1) / (2 * eps))
    counts = [round(w * m) for w in weights]
    largest = max(range(len(weights)), key=lambda i: weights[i])
    counts[largest] += m - sum(counts)
    if counts[largest] < 0:
        raise PreconditionError(f"eps = {eps} is too coarse for {len(weights)} atoms")
    logger.debug("rationalized %d weights onto denominator %d", len(weights), m)
    return DiscreteMeasure(np.array([Fraction(c, m) for c in counts], dtype=object))


def replicate(f: RandomVariable, nu: DiscreteMeasure) -> RandomVariable:
    """
    Repeat coordinate i of f r_i times, where nu has weights r_i/m. The result
    lives on the uniform space with m atoms.
    """
    if not nu.is_exact:
        raise PreconditionError("replicate needs a measure with rational weights")
    _check_dims(f, nu)
    m = nu.common_denominator()
    counts = [int(w * m) for w in nu.weights]
    return RandomVariable(np.repeat(f.values, counts), f.scalar_field)


@dataclass
class ReductionDeviation:
    """|sigma_p(h; mu) - sigma_p(h; nu)| for one of h = f, g, fg, with its a-priori bound."""

    name: str
    deviation: float
    bound: float

    @property
    def within_bound(self) -> bool:
        return self.deviation <= self.bound + 1e-12


def reduction_bound(sup: float, n: int, eps: float, p) -> float:
    """
    Bound on |sigma_p(h; mu) - sigma_p(h; nu)| when max_i |mu_i - nu_i| <= eps
    and ||h||_inf <= sup:

        (n eps (2 sup)^p (1 + p/2))^(1/p)
    """
    p = PExponent.coerce(p)
    if p.is_infinite:
        raise PreconditionError("the reduction bound is stated for finite p")
    pv = p.value
    return (n * eps * (2 * float(sup)) ** pv * (1 + pv / 2)) ** (1 / pv)


def reduction_deviations(f: RandomVariable, g: RandomVariable, mu: DiscreteMeasure,
                         nu: DiscreteMeasure, p) -> List[ReductionDeviation]:
    """The three deviations of sigma_p for f, g and fg when mu is replaced by nu."""
    p = PExponent.coerce(p)
    if mu.n != nu.n:
        raise PreconditionError("mu and nu must live on the same atoms")
    eps = max(abs(float(a) - float(b)) for a, b in zip(mu.weights, nu.weights))
    deviations = []
    for name, h in (("f", f), ("g", g), ("fg", f * g)):
        h_float = h.to_float()
        deviation = abs(float(centered_moment(h_float, mu.to_float(), p))
                        - float(centered_moment(h_float, nu.to_float(), p)))
        deviations.append(ReductionDeviation(name, deviation, reduction_bound(sup_norm(h_float), mu.n, eps, p)))
    return deviations


def extreme_sign_vectors(n: int) -> Iterator[np.ndarray]:
    """All 2^n vectors in {-1, +1}^n, starting from the all-ones vector."""
    if n < 1:
        raise PreconditionError(f"n must be >= 1, got {n}")
    if n > MAX_SIGN_VECTOR_LENGTH:
        raise EnumerationLimitError(f"refusing to enumerate 2^{n} sign vectors (limit n <= {MAX_SIGN_VECTOR_LENGTH})")
    for signs in itertools.product((1.0, -1.0), repeat=n):
        yield np.array(signs)


def _mass_is_zero(mass, exact: bool) -> bool:
    return mass == 0 if exact else abs(mass) <= MAJORIZATION_TOLERANCE


def extreme_mean_zero_points(mu: DiscreteMeasure) -> Iterator[RandomVariable]:
    """
    Extreme points of {f real : E f = 0, ||f||_inf <= 1}: functions taking the
    values +1, -1 and one intermediate value c with

        mu(f = 1) - mu(f = -1) + c mu(f = c) = 0,   -1 < c < 1.

    When the c-class carries no mass the +1 and -1 masses must balance and c is 0.
    """
    n = mu.n
    if n > MAX_EXTREME_POINT_ATOMS:
        raise EnumerationLimitError(f"refusing to enumerate 3^{n} class assignments (limit {MAX_EXTREME_POINT_ATOMS} atoms)")
    exact = mu.is_exact
    one = Fraction(1) if exact else 1.0
    weights = list(mu.weights)
    for classes in itertools.product((1, -1, 0), repeat=n):
        plus = sum((w for w, k in zip(weights, classes) if k == 1), 0 * one)
        minus = sum((w for w, k in zip(weights, classes) if k == -1), 0 * one)
        middle = sum((w for w, k in zip(weights, classes) if k == 0), 0 * one)
        if _mass_is_zero(middle, exact):
            if not _mass_is_zero(plus - minus, exact):
                continue
            c = 0 * one
        else:
            c = (minus - plus) / middle
            if not -1 < c < 1:
                continue
        values = [one * k if k != 0 else c for k in classes]
        if exact:
            yield RandomVariable(np.array(values, dtype=object))
        else:
            yield RandomVariable(np.array(values, dtype=float))


@dataclass
class ExtremePointCheck:
    """Auxiliary inequality at p = inf over every extreme mean-zero point."""

    points: int
    max_defect: Scalar
    violations: int
    identity_error: Scalar
    max_c_norm: Scalar

    @property
    def holds(self) -> bool:
        return self.violations == 0


def _intermediate_value(f: RandomVariable):
    for v in f.values:
        if abs(v) < 1:
            return v
    return 0 * f.values[0]


def extreme_point_check(mu: DiscreteMeasure, x: RandomVariable,
                        tolerance: Optional[Scalar] = None) -> ExtremePointCheck:
    """
    Evaluate the p = inf auxiliary defect at every extreme point f for a fixed x,
    and the L^1 identities ||1 - f||_1 = ||1 + f||_1 = 1, ||c - f||_1 <= 1.
    """
    _check_dims(x, mu)
    points, violations = 0, 0
    max_defect = None
    identity_error = 0
    max_c_norm = 0
    ones = constant(1, mu.n)
    if mu.is_exact:
        ones = ones.to_exact()
    for f in extreme_mean_zero_points(mu):
        report = auxiliary_defect(f, x, mu, math.inf, tolerance=tolerance)
        points += 1
        violations += report.violated
        if max_defect is None or report.defect > max_defect:
            max_defect = report.defect
        c = _intermediate_value(f)
        minus_norm = p_norm(RandomVariable(ones.values - f.values), mu, 1)
        plus_norm = p_norm(RandomVariable(ones.values + f.values), mu, 1)
        c_norm = p_norm(RandomVariable(c - f.values), mu, 1)
        identity_error = max(identity_error, abs(minus_norm - 1), abs(plus_norm - 1))
        max_c_norm = max(max_c_norm, c_norm)
    return ExtremePointCheck(points, max_defect if max_defect is not None else 0, violations,
                             identity_error, max_c_norm)
