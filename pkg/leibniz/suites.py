"""
Verification suites: Monte-Carlo and enumeration checks of the inequalities
that are proved, plus exploratory checks that are only reported.

A suite passes when no asserted check records a defect above the tolerance.
"""

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, List, Optional

import numpy as np
import pandas as pd

from .config import DEFAULT_CONFIG
from .errors import PreconditionError
from .inequalities import (
    DefectReport,
    auxiliary_defect,
    leibniz_defect,
    monotone_corollary_defect,
    renorm_inverse_defects,
    rough_leibniz_defect,
    rough_one_sided_defect,
    square_corollary_defect,
    strong_leibniz_defect,
)
from .ncalg import (
    MAX,
    PLAIN,
    DensityState,
    commutator_dirac_norm,
    derivation_construct_norm,
    inverse_inequality_defect,
    lemma_defect,
    module_bound_defect,
    nc_sigma2_max,
    operator_norm,
    product_leibniz_nc_defect,
    random_element,
)
from .prob_core import (
    DiscreteMeasure,
    PExponent,
    RandomVariable,
    centered_moment,
    centered_moment_power,
    expectation,
    format_scalar,
    sup_norm,
)
from .projections import (
    DEFAULT_P_GRID,
    franchetti_norm,
    interpolation_bound,
    measure_exact_norm,
    numeric_operator_p_norm,
    projection_table,
    uniform_exact_norm,
)
from .sampling import (
    random_aligned_pair,
    random_complex,
    random_invertible,
    random_monotone_pair,
    random_nonnegative,
    random_rational_measure,
    random_real,
    simplex_weights,
)
from .structure import (
    extreme_point_check,
    rationalize,
    reduction_deviations,
    replicate,
    same_order,
    schur_leibniz_verify,
)

logger = logging.getLogger(__name__)

SCALAR_P_GRID = (1, 1.5, 2, 3)
NC_DIMENSIONS = (2, 3, 4)
REDUCTION_P_GRID = (1.5, 3)
REDUCTION_TOLERANCE = 1e-12
MATCH_TOLERANCE = 1e-6
NC_IDENTITY_TOLERANCE = 1e-8
# keeps ||a^-1|| moderate so absolute tolerances stay meaningful
NC_SAMPLE_SINGULAR_FLOOR = 0.05


@dataclass
class CheckResult:
    """Aggregate of one check over many instances."""

    name: str
    trials: int = 0
    max_defect: float = -math.inf
    violations: int = 0
    tolerance: float = 1e-9
    asserted: bool = True
    detail: Dict[str, object] = field(default_factory=dict)

    def record(self, defect, violated: Optional[bool] = None, instance: Optional[Dict[str, object]] = None):
        """Add one instance; ``violated`` defaults to defect > tolerance."""
        defect = float(defect)
        self.trials += 1
        if violated is None:
            violated = defect > self.tolerance
        if defect > self.max_defect:
            self.max_defect = defect
        if violated:
            self.violations += 1
            if instance is not None and "first_violation" not in self.detail:
                self.detail["first_violation"] = instance

    def add(self, report: DefectReport):
        self.record(report.defect, report.violated, report.inputs)

    @property
    def passed(self) -> bool:
        return not self.asserted or self.violations == 0

    def to_dict(self) -> Dict[str, object]:
        return {
            "name": self.name,
            "trials": self.trials,
            "max_defect": format_scalar(self.max_defect),
            "violations": self.violations,
            "tolerance": format_scalar(self.tolerance),
            "asserted": self.asserted,
            "detail": self.detail,
        }


@dataclass
class SuiteReport:
    name: str
    trials: int
    seed: int
    tolerance: float
    checks: List[CheckResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)

    def failing(self) -> List[CheckResult]:
        return [check for check in self.checks if not check.passed]

    def to_dict(self) -> Dict[str, object]:
        return {
            "suite": self.name,
            "trials": self.trials,
            "seed": self.seed,
            "tolerance": format_scalar(self.tolerance),
            "passed": self.passed,
            "checks": [check.to_dict() for check in self.checks],
        }

    def to_frame(self) -> pd.DataFrame:
        rows = [{
            "check": c.name,
            "trials": c.trials,
            "max_defect": c.max_defect,
            "violations": c.violations,
            "asserted": c.asserted,
        } for c in self.checks]
        return pd.DataFrame(rows, columns=["check", "trials", "max_defect", "violations", "asserted"])


class _Streams:
    """Independent generators, one per check, spawned from the suite seed."""

    def __init__(self, seed: int):
        self._sequence = np.random.SeedSequence(seed)

    def next(self) -> np.random.Generator:
        return np.random.default_rng(self._sequence.spawn(1)[0])


def _p_label(p) -> str:
    return str(PExponent.coerce(p))


def _upper_operator_norm(mu: DiscreteMeasure, p: PExponent) -> float:
    """Exact ||I-P||_p where known, otherwise the interpolation upper bound."""
    if p.is_infinite or p.value in (1, 2):
        return float(measure_exact_norm(mu, p))
    return interpolation_bound(p).derived


def _random_measure(rng: np.random.Generator, low: int = 2, high: int = 6) -> DiscreteMeasure:
    return simplex_weights(int(rng.integers(low, high + 1)), rng)


def scalar_suite(trials: int, seed: int, tolerance: float, config: Optional[Dict] = None) -> SuiteReport:
    config = config or DEFAULT_CONFIG
    floor = config.get("strong_floor", DEFAULT_CONFIG["strong_floor"])
    report = SuiteReport("scalar", trials, seed, tolerance)
    streams = _Streams(seed)

    def check(name: str, asserted: bool = True) -> CheckResult:
        result = CheckResult(name, tolerance=tolerance, asserted=asserted)
        report.checks.append(result)
        return result

    # auxiliary inequality on small uniform spaces and on two atoms
    for n in (2, 3, 4):
        mu = DiscreteMeasure.uniform(n)
        for p in SCALAR_P_GRID:
            result, rng = check(f"auxiliary_uniform_n{n}_p{_p_label(p)}"), streams.next()
            for _ in range(trials):
                result.add(auxiliary_defect(random_real(n, rng), random_real(n, rng), mu, p, tolerance))
    for p in SCALAR_P_GRID:
        result, rng = check(f"auxiliary_two_atoms_p{_p_label(p)}"), streams.next()
        for _ in range(trials):
            mu = simplex_weights(2, rng)
            result.add(auxiliary_defect(random_real(2, rng), random_real(2, rng), mu, p, tolerance))

    result, rng = check("auxiliary_sup_norm"), streams.next()
    for _ in range(trials):
        mu = _random_measure(rng)
        result.add(auxiliary_defect(random_real(mu.n, rng), random_complex(mu.n, rng), mu, math.inf, tolerance))

    # sigma_inf on real variables and sigma_2 on any measure
    leib_inf, strong_inf = check("leibniz_sup_norm"), check("strong_leibniz_sup_norm")
    leib_two, strong_two = check("leibniz_p2"), check("strong_leibniz_p2")
    rng = streams.next()
    for _ in range(trials):
        mu = _random_measure(rng)
        n = mu.n
        leib_inf.add(leibniz_defect(random_real(n, rng), random_real(n, rng), mu, math.inf, tolerance))
        strong_inf.add(strong_leibniz_defect(random_invertible(n, rng, floor), mu, math.inf, tolerance))
        leib_two.add(leibniz_defect(random_complex(n, rng), random_complex(n, rng), mu, 2, tolerance))
        strong_two.add(strong_leibniz_defect(random_invertible(n, rng, floor), mu, 2, tolerance))

    # strong Leibniz on uniform spaces with at most four atoms
    for n in (1, 2, 3, 4):
        mu = DiscreteMeasure.uniform(n)
        for p in SCALAR_P_GRID:
            leib, strong = check(f"leibniz_uniform_n{n}_p{_p_label(p)}"), check(f"strong_leibniz_uniform_n{n}_p{_p_label(p)}")
            rng = streams.next()
            for _ in range(trials):
                leib.add(leibniz_defect(random_real(n, rng), random_real(n, rng), mu, p, tolerance))
                strong.add(strong_leibniz_defect(random_invertible(n, rng, floor), mu, p, tolerance))

    # corollaries for non-negative and monotone variables
    for p in SCALAR_P_GRID:
        square, monotone = check(f"square_corollary_p{_p_label(p)}"), check(f"monotone_corollary_p{_p_label(p)}")
        rng = streams.next()
        for _ in range(trials):
            mu = _random_measure(rng)
            square.add(square_corollary_defect(random_nonnegative(mu.n, rng), mu, p, tolerance))
            f, g = random_monotone_pair(mu.n, rng)
            grid = np.sort(rng.uniform(0.0, 1.0, size=mu.n))
            if np.any(np.diff(grid) <= 0):
                grid = np.linspace(0.0, 1.0, mu.n)
            monotone.add(monotone_corollary_defect(f, g, mu, p, grid=grid, tolerance=tolerance))

    # rough bounds through ||I-P||_p
    for p in (1, 1.5, 2, 3, math.inf):
        p = PExponent.coerce(p)
        rough, one_sided = check(f"rough_leibniz_p{p}"), check(f"rough_one_sided_p{p}")
        first, second = check(f"renorm_inverse_p{p}"), check(f"renorm_inverse_mean_p{p}")
        rng = streams.next()
        for _ in range(trials):
            mu = _random_measure(rng)
            op_norm = max(_upper_operator_norm(mu, p), 1.0)
            f, g = random_complex(mu.n, rng), random_complex(mu.n, rng)
            rough.add(rough_leibniz_defect(f, g, mu, p, op_norm, tolerance))
            one_sided.add(rough_one_sided_defect(f, g, mu, p, op_norm, tolerance))
            inverse_first, inverse_second = renorm_inverse_defects(random_invertible(mu.n, rng, floor), mu, p,
                                                                   op_norm, tolerance)
            first.add(inverse_first)
            second.add(inverse_second)

    # extreme points of the mean-zero ball, exactly
    extreme, rng = check("auxiliary_extreme_points"), streams.next()
    identities = CheckResult("extreme_point_norm_identities", tolerance=0)
    report.checks.append(identities)
    for _ in range(min(trials, 20)):
        mu = random_rational_measure(int(rng.integers(2, 5)), rng)
        x = RandomVariable(np.array([Fraction(int(v), 4) for v in rng.integers(-4, 5, size=mu.n)], dtype=object))
        outcome = extreme_point_check(mu, x, tolerance=Fraction(0))
        extreme.record(outcome.max_defect, outcome.violations > 0)
        identities.record(max(outcome.identity_error, outcome.max_c_norm - 1))
    return report


def projections_suite(trials: int, seed: int, tolerance: float, config: Optional[Dict] = None) -> SuiteReport:
    config = config or DEFAULT_CONFIG
    budget = config.get("operator_budget", DEFAULT_CONFIG["operator_budget"])
    grid = config.get("franchetti_grid", DEFAULT_CONFIG["franchetti_grid"])
    report = SuiteReport("projections", trials, seed, tolerance)

    matches = CheckResult("numeric_norm_matches_closed_form", tolerance=MATCH_TOLERANCE)
    for n in range(1, 11):
        for p in (1, 2, math.inf):
            estimate = numeric_operator_p_norm(n, p, budget, seed=seed)
            exact = float(uniform_exact_norm(n, p))
            matches.record(abs(estimate.value - exact), instance={"n": n, "p": _p_label(p)})
    report.checks.append(matches)

    at_two = CheckResult("franchetti_at_2", tolerance=tolerance)
    at_two.record(abs(franchetti_norm(2, grid).value - 1.0))
    report.checks.append(at_two)

    symmetry = CheckResult("franchetti_conjugate_symmetry", tolerance=tolerance)
    below = CheckResult("franchetti_below_derived_bound", tolerance=tolerance)
    in_range = CheckResult("franchetti_in_range", tolerance=0)
    for token in DEFAULT_P_GRID:
        p = PExponent.parse(token)
        value = franchetti_norm(p, grid).value
        symmetry.record(abs(value - franchetti_norm(p.conjugate(), grid).value), instance={"p": str(p)})
        below.record(value - interpolation_bound(p).derived, instance={"p": str(p)})
        in_range.record(max(1.0 - value, value - 2.0), instance={"p": str(p)})
    report.checks.extend([symmetry, below, in_range])

    table = projection_table(DEFAULT_P_GRID, grid=grid)
    printed = CheckResult("franchetti_below_printed_bound", tolerance=tolerance, asserted=False)
    for row in table.itertuples():
        printed.record(row.franchetti - row.printed_bound, instance={"p": row.p})
    printed.detail["table"] = [
        {"p": row.p, "franchetti": format_scalar(row.franchetti), "printed_bound": format_scalar(row.printed_bound),
         "derived_bound": format_scalar(row.derived_bound), "uniform_n_values": row.uniform_n_values}
        for row in table.itertuples()
    ]
    report.checks.append(printed)
    return report


def majorization_suite(trials: int, seed: int, tolerance: float, config: Optional[Dict] = None) -> SuiteReport:
    report = SuiteReport("majorization", trials, seed, tolerance)
    streams = _Streams(seed)
    for n in range(2, 9):
        aligned = CheckResult(f"alignment_found_n{n}", tolerance=0)
        dominance = CheckResult(f"partial_sum_dominance_n{n}", tolerance=0)
        defect = CheckResult(f"schur_leibniz_n{n}", tolerance=tolerance)
        rng = streams.next()
        for k in range(trials):
            f, g = random_aligned_pair(n, rng)
            if not same_order(f, g).aligned:
                aligned.record(1.0)
                continue
            aligned.record(0.0)
            outcome = schur_leibniz_verify(f, g, n, SCALAR_P_GRID[k % len(SCALAR_P_GRID)], tolerance)
            dominance.record(0.0 if outcome.majorized else 1.0)
            defect.add(outcome.defect)
        report.checks.extend([aligned, dominance, defect])
    return report


def _random_rational_vector(n: int, rng: np.random.Generator) -> RandomVariable:
    return RandomVariable(np.array([Fraction(int(a), int(b)) for a, b in
                                    zip(rng.integers(-6, 7, size=n), rng.integers(1, 5, size=n))], dtype=object))


def reduction_suite(trials: int, seed: int, tolerance: float, config: Optional[Dict] = None) -> SuiteReport:
    report = SuiteReport("reduction", trials, seed, tolerance)
    streams = _Streams(seed)
    exact_checks = {name: CheckResult(f"replicate_preserves_{name}", tolerance=0)
                    for name in ("expectation", "sup_norm", "sigma_1", "sigma_2", "product")}
    float_checks = {p: CheckResult(f"replicate_preserves_sigma_p{_p_label(p)}", tolerance=REDUCTION_TOLERANCE)
                    for p in REDUCTION_P_GRID}
    rng = streams.next()
    for _ in range(trials):
        nu = random_rational_measure(int(rng.integers(1, 6)), rng)
        f, g = _random_rational_vector(nu.n, rng), _random_rational_vector(nu.n, rng)
        phi_f, phi_g = replicate(f, nu), replicate(g, nu)
        lam = DiscreteMeasure.uniform(phi_f.n, exact=True)
        exact_checks["expectation"].record(abs(expectation(f, nu) - expectation(phi_f, lam)))
        exact_checks["sup_norm"].record(abs(_ess_sup(f, nu) - sup_norm(phi_f)))
        exact_checks["sigma_1"].record(abs(centered_moment(f, nu, 1) - centered_moment(phi_f, lam, 1)))
        exact_checks["sigma_2"].record(abs(centered_moment_power(f, nu, 2) - centered_moment_power(phi_f, lam, 2)))
        product_gap = replicate(f * g, nu).values - (phi_f * phi_g).values
        exact_checks["product"].record(max((abs(v) for v in product_gap), default=0))
        for p, result in float_checks.items():
            result.record(abs(float(centered_moment(f.to_float(), nu.to_float(), p))
                              - float(centered_moment(phi_f.to_float(), lam.to_float(), p))))
    report.checks.extend(exact_checks.values())
    report.checks.extend(float_checks.values())

    closeness = CheckResult("rationalize_within_eps", tolerance=0)
    deviations = CheckResult("reduction_deviation_bound", tolerance=0)
    eps = 1e-3
    rng = streams.next()
    for _ in range(trials):
        mu = _random_measure(rng)
        nu = rationalize(mu, eps)
        gap = max(abs(float(a) - float(b)) for a, b in zip(mu.weights, nu.weights))
        closeness.record(0.0 if gap <= eps and sum(nu.weights) == 1 else 1.0)
        f, g = random_real(mu.n, rng), random_real(mu.n, rng)
        for p in (1, 2, 3):
            worst = max(d.deviation - d.bound for d in reduction_deviations(f, g, mu, nu, p))
            deviations.record(max(worst, 0.0) if worst > REDUCTION_TOLERANCE else 0.0)
    report.checks.extend([closeness, deviations])
    return report


def _ess_sup(f: RandomVariable, mu: DiscreteMeasure):
    return max(abs(v) for v, charged in zip(f.values, mu.support()) if charged)


def _random_nc_invertible(d: int, rng: np.random.Generator) -> np.ndarray:
    while True:
        a = random_element(d, rng)
        if np.linalg.svd(a, compute_uv=False).min() >= NC_SAMPLE_SINGULAR_FLOOR:
            return a


def nc_suite(trials: int, seed: int, tolerance: float, config: Optional[Dict] = None) -> SuiteReport:
    config = config or DEFAULT_CONFIG
    max_condition = config.get("max_condition", DEFAULT_CONFIG["max_condition"])
    floor = config.get("invertibility_floor", DEFAULT_CONFIG["invertibility_floor"])
    samples = config.get("derivation_samples", DEFAULT_CONFIG["derivation_samples"])
    report = SuiteReport("nc", trials, seed, tolerance)
    streams = _Streams(seed)

    for d in NC_DIMENSIONS:
        checks = {
            "commutator": CheckResult(f"commutator_identity_d{d}", tolerance=NC_IDENTITY_TOLERANCE),
            "lemma": CheckResult(f"lemma_d{d}", tolerance=tolerance),
            "module": CheckResult(f"module_bound_d{d}", tolerance=tolerance),
            "inverse": CheckResult(f"inverse_d{d}", tolerance=tolerance),
            "inverse_max": CheckResult(f"inverse_max_d{d}", tolerance=tolerance),
            "product_tracial": CheckResult(f"product_tracial_d{d}", tolerance=tolerance),
            "product_max": CheckResult(f"product_max_d{d}", tolerance=tolerance),
            "product_nontracial": CheckResult(f"product_nontracial_d{d}", tolerance=tolerance, asserted=False),
            "derivation": CheckResult(f"derivation_sup_d{d}", tolerance=tolerance),
            "right_multiplication": CheckResult(f"right_multiplication_norm_d{d}", tolerance=tolerance),
            "right_multiplication_order": CheckResult(f"right_multiplication_order_d{d}", tolerance=tolerance),
        }
        tracial = DensityState.tracial(d)
        rng = streams.next()
        for k in range(trials):
            w = DensityState.random_faithful(d, rng, max_condition)
            a, x, b = random_element(d, rng), random_element(d, rng), random_element(d, rng)
            checks["commutator"].record(abs(commutator_dirac_norm(a, w) - nc_sigma2_max(a, w)))
            checks["lemma"].add(lemma_defect(a, x, w, tolerance))
            checks["module"].add(module_bound_defect(x, a, w, tolerance))
            invertible = _random_nc_invertible(d, rng)
            checks["inverse"].add(inverse_inequality_defect(invertible, w, PLAIN, floor, tolerance))
            checks["inverse_max"].add(inverse_inequality_defect(invertible, w, MAX, floor, tolerance))
            checks["product_tracial"].add(product_leibniz_nc_defect(a, b, tracial, PLAIN, tolerance))
            checks["product_max"].add(product_leibniz_nc_defect(a, b, w, MAX, tolerance))
            checks["product_nontracial"].add(product_leibniz_nc_defect(a, b, w, PLAIN, tolerance))
            if k % 10 == 0:
                construct = derivation_construct_norm(a, tracial, samples, seed=int(rng.integers(2 ** 31)))
                checks["derivation"].record(abs(construct.sampled_sup - construct.closed_form))
                norm = operator_norm(a)
                checks["right_multiplication"].record(max(construct.t_norm_sample_max - norm,
                                                          norm - construct.t_norm_witness,
                                                          construct.composition_error))
                checks["right_multiplication_order"].record(construct.composition_error
                                                            - construct.reversed_composition_error)
        report.checks.extend(checks.values())
    return report


SUITES: Dict[str, Callable[..., SuiteReport]] = {
    "scalar": scalar_suite,
    "projections": projections_suite,
    "majorization": majorization_suite,
    "reduction": reduction_suite,
    "nc": nc_suite,
}


def run_suite(name: str, trials: int, seed: int, tolerance: float, config: Optional[Dict] = None) -> SuiteReport:
    if name not in SUITES:
        raise PreconditionError(f"unknown suite {name!r}, expected one of {', '.join(SUITES)}")
    if trials <= 0:
        raise PreconditionError("trials must be positive")
    logger.info("running %s suite: %d trials, seed %d", name, trials, seed)
    return SUITES[name](trials, seed, tolerance, config)
