"""
Counterexample search: maximize an inequality defect over bounded instances.

Every objective is a box-constrained, derivative-free maximization run as a
coordinate pattern search from several random starts. Restarts draw from
independent RNG streams spawned from the task seed, so a task always yields
the same result.
"""

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

import mpmath
import numpy as np
import pandas as pd

from .errors import PreconditionError
from .inequalities import (
    DEFAULT_TOLERANCE,
    DefectReport,
    auxiliary_defect,
    leibniz_defect,
    strong_leibniz_defect,
)
from .ncalg import (
    PLAIN,
    DensityState,
    nc_sigma2,
    operator_norm,
    product_leibniz_nc_defect,
)
from .optimize import pattern_search
from .prob_core import (
    DiscreteMeasure,
    PExponent,
    RandomVariable,
    centered_moment,
    expectation,
    format_scalar,
    format_vector,
    p_norm,
    parse_vector,
    sup_norm,
)
from .sampling import simplex_weights
from .structure import extreme_sign_vectors

logger = logging.getLogger(__name__)

LEIBNIZ = "leibniz"
STRONG_LEIBNIZ = "strong_leibniz"
AUXILIARY = "auxiliary"
NC_PRODUCT = "nc_product"
OBJECTIVES = (LEIBNIZ, STRONG_LEIBNIZ, AUXILIARY, NC_PRODUCT)

UNIFORM = "uniform"
SIMPLEX_RANDOM = "simplex_random"
FIXED = "fixed"
MEASURE_FAMILIES = (UNIFORM, SIMPLEX_RANDOM, FIXED)

TRACIAL = "tracial"
NONTRACIAL = "nontracial"

PRECISE_DIGITS = 60
# sign vectors are enumerated exhaustively up to this many atoms, then searched greedily
EXHAUSTIVE_SIGN_ATOMS = 8
DEFAULT_SCAN_OBJECTIVES = (LEIBNIZ, STRONG_LEIBNIZ, AUXILIARY)
# objectives whose violations are already known; scanned for comparison only
DIAGNOSTIC_OBJECTIVES = (AUXILIARY,)


@dataclass
class SearchTask:
    objective: str
    n: int
    p: PExponent
    measure_family: str = UNIFORM
    budget: int = 20000
    seed: int = 1
    d: int = 2
    state: str = TRACIAL
    weights: Optional[Sequence] = None
    floor: float = 0.05
    restarts: int = 20

    def __post_init__(self):
        self.p = PExponent.coerce(self.p)
        if self.objective not in OBJECTIVES:
            raise PreconditionError(f"unknown objective {self.objective!r}, expected one of {', '.join(OBJECTIVES)}")
        if self.measure_family not in MEASURE_FAMILIES:
            raise PreconditionError(f"unknown measure family {self.measure_family!r}")
        if self.budget <= 0:
            raise PreconditionError("budget must be positive")
        if self.n < 1:
            raise PreconditionError(f"n must be >= 1, got {self.n}")
        if self.restarts < 1:
            raise PreconditionError("at least one restart is needed")
        if not 0 < self.floor < 1:
            raise PreconditionError(f"floor must lie in (0, 1), got {self.floor}")
        if self.measure_family == FIXED:
            if self.weights is None:
                raise PreconditionError("the fixed measure family needs weights")
            if len(self.weights) != self.n:
                raise PreconditionError(f"{len(self.weights)} weights given for n = {self.n}")

    def describe(self) -> Dict[str, object]:
        data = {
            "objective": self.objective,
            "n": self.n,
            "p": str(self.p),
            "measure_family": self.measure_family,
            "budget": self.budget,
            "seed": self.seed,
            "restarts": self.restarts,
        }
        if self.objective == NC_PRODUCT:
            data["d"] = self.d
            data["state"] = self.state
        if self.objective == STRONG_LEIBNIZ:
            data["floor"] = self.floor
        return data


@dataclass
class Recertification:
    """Sign of the defect recomputed in exact or 60-digit arithmetic."""

    mode: str
    sign: int
    defect: str


@dataclass
class SearchResult:
    best_defect: float
    witness: Dict[str, object]
    evaluations_used: int
    history: List[float] = field(default_factory=list)
    exhausted: bool = False
    recertification: Optional[Recertification] = None

    def to_dict(self) -> Dict[str, object]:
        data = {
            "best_defect": format_scalar(self.best_defect),
            "witness": self.witness,
            "evaluations_used": self.evaluations_used,
            "exhausted": self.exhausted,
            "history": [format_scalar(v) for v in self.history],
        }
        if self.recertification is not None:
            data["recertification"] = {
                "mode": self.recertification.mode,
                "sign": self.recertification.sign,
                "defect": self.recertification.defect,
            }
        return data


def parse_state(spec: str, d: int) -> Optional[DensityState]:
    """"tracial", "nontracial" (drawn per restart, returns None) or a spectrum list."""
    token = spec.strip().lower()
    if token == TRACIAL:
        return DensityState.tracial(d)
    if token == NONTRACIAL:
        return None
    try:
        spectrum = [float(v) for v in token.split(",")]
    except ValueError as e:
        raise PreconditionError(f"state must be tracial, nontracial or a spectrum list, got {spec!r}") from e
    if len(spectrum) != d:
        raise PreconditionError(f"spectrum has {len(spectrum)} entries, expected d = {d}")
    return DensityState.from_spectrum(spectrum)


class _Objective:
    """Search space, feasibility map and defect of one objective."""

    def __init__(self, task: SearchTask):
        self.task = task
        self.p = task.p

    @property
    def size(self) -> int:
        raise NotImplementedError

    def context(self, rng: np.random.Generator):
        raise NotImplementedError

    def random_start(self, rng: np.random.Generator) -> np.ndarray:
        return rng.uniform(-1.0, 1.0, size=self.size)

    def project(self, z: np.ndarray) -> np.ndarray:
        return np.clip(z, -1.0, 1.0)

    extra_moves = None

    def value(self, z: np.ndarray, context) -> float:
        raise NotImplementedError

    def witness(self, z: np.ndarray, context) -> Dict[str, object]:
        raise NotImplementedError

    def seed_points(self, context) -> Iterator[np.ndarray]:
        return iter(())


class _ScalarObjective(_Objective):

    def __init__(self, task: SearchTask):
        super().__init__(task)
        self.n = task.n
        self._fixed = None
        if task.measure_family == UNIFORM:
            self._fixed = DiscreteMeasure.uniform(task.n)
        elif task.measure_family == FIXED:
            self._fixed = DiscreteMeasure(list(task.weights)).to_float()

    def context(self, rng):
        if self._fixed is not None:
            return self._fixed
        return simplex_weights(self.n, rng)

    def _witness(self, context, **vectors) -> Dict[str, object]:
        data = {name: format_vector(v) for name, v in vectors.items()}
        data["weights"] = format_vector(context.weights)
        return data


class _LeibnizObjective(_ScalarObjective):

    @property
    def size(self):
        return 2 * self.n

    def value(self, z, mu):
        f = RandomVariable(z[:self.n])
        g = RandomVariable(z[self.n:])
        lhs = centered_moment(f * g, mu, self.p)
        rhs = sup_norm(f) * centered_moment(g, mu, self.p) + sup_norm(g) * centered_moment(f, mu, self.p)
        return float(lhs - rhs)

    def witness(self, z, mu):
        return self._witness(mu, f=z[:self.n], g=z[self.n:])


class _StrongLeibnizObjective(_ScalarObjective):
    """f in the box with every |f_i| >= floor."""

    @property
    def size(self):
        return self.n

    def project(self, z):
        z = np.clip(z, -1.0, 1.0)
        floor = self.task.floor
        return np.where(np.abs(z) < floor, np.where(z < 0, -floor, floor), z)

    def value(self, z, mu):
        f = RandomVariable(z)
        inverse = f.reciprocal()
        lhs = centered_moment(inverse, mu, self.p)
        inverse_sup = sup_norm(inverse)
        rhs = inverse_sup * inverse_sup * centered_moment(f, mu, self.p)
        return float(lhs - rhs)

    def witness(self, z, mu):
        return self._witness(mu, f=z)


class _AuxiliaryObjective(_ScalarObjective):
    """Real f in the box and x restricted to sign vectors."""

    def __init__(self, task: SearchTask):
        super().__init__(task)
        self._signs = None

    @property
    def size(self):
        return 2 * self.n

    def project(self, z):
        n = self.n
        return np.concatenate([np.clip(z[:n], -1.0, 1.0), np.where(z[n:] < 0, -1.0, 1.0)])

    def extra_moves(self, z):
        for i in range(self.n):
            y = z.copy()
            y[self.n + i] = -y[self.n + i]
            yield y

    def value(self, z, mu):
        f = RandomVariable(z[:self.n])
        x = RandomVariable(z[self.n:])
        h = f.scaled(expectation(x, mu)).shifted(-expectation(f * x, mu))
        return float(p_norm(h, mu, self.p) - sup_norm(x) * centered_moment(f, mu, self.p))

    def witness(self, z, mu):
        return self._witness(mu, f=z[:self.n], x=z[self.n:])

    def sign_vectors(self) -> Optional[List[np.ndarray]]:
        """Every x in {-1, +1}^n when n is small enough to enumerate, else None."""
        if self.n > EXHAUSTIVE_SIGN_ATOMS:
            return None
        if self._signs is None:
            self._signs = list(extreme_sign_vectors(self.n))
        return self._signs

    def seed_points(self, mu):
        """Dipoles f = e_i - e_j, each later paired with its best sign vector."""
        n = self.n
        for i in range(n):
            for j in range(i + 1, n):
                f = np.zeros(n)
                f[i], f[j] = 1.0, -1.0
                yield np.concatenate([f, np.ones(n)])


class _NcProductObjective(_Objective):
    """a, b in M_d with real and imaginary parts of every entry in [-1, 1]."""

    def __init__(self, task: SearchTask):
        super().__init__(task)
        self.d = task.d
        self._fixed = parse_state(task.state, task.d)

    @property
    def size(self):
        return 4 * self.d * self.d

    def context(self, rng):
        if self._fixed is not None:
            return self._fixed
        return DensityState.random_faithful(self.d, rng)

    def _matrices(self, z) -> Tuple[np.ndarray, np.ndarray]:
        k = self.d * self.d
        shape = (self.d, self.d)
        a = (z[:k] + 1j * z[k:2 * k]).reshape(shape)
        b = (z[2 * k:3 * k] + 1j * z[3 * k:]).reshape(shape)
        return a, b

    def value(self, z, w):
        a, b = self._matrices(z)
        lhs = nc_sigma2(a @ b, w)
        rhs = operator_norm(a) * nc_sigma2(b, w) + operator_norm(b) * nc_sigma2(a, w)
        return lhs - rhs

    def witness(self, z, w):
        a, b = self._matrices(z)
        return {
            "a": [format_vector(row) for row in a],
            "b": [format_vector(row) for row in b],
            "rho": [format_vector(row) for row in w.rho],
        }


_OBJECTIVE_TYPES = {
    LEIBNIZ: _LeibnizObjective,
    STRONG_LEIBNIZ: _StrongLeibnizObjective,
    AUXILIARY: _AuxiliaryObjective,
    NC_PRODUCT: _NcProductObjective,
}


def _greedy_signs(problem: _AuxiliaryObjective, z: np.ndarray, mu, budget: int) -> Tuple[np.ndarray, float, int]:
    """Flip single signs of x while that improves the defect."""
    value = problem.value(z, mu)
    evaluations = 1
    while evaluations < budget:
        best_move, best_value = None, value
        for y in problem.extra_moves(z):
            if evaluations >= budget:
                break
            candidate = problem.value(y, mu)
            evaluations += 1
            if candidate > best_value:
                best_move, best_value = y, candidate
        if best_move is None:
            break
        z, value = best_move, best_value
    return z, value, evaluations


def _best_signs(problem: _AuxiliaryObjective, z: np.ndarray, mu, budget: int) -> Tuple[np.ndarray, float, int]:
    """Best x for the f part of z: every sign vector when they fit the budget, greedy flips otherwise."""
    signs = problem.sign_vectors()
    if signs is None or len(signs) > budget:
        return _greedy_signs(problem, z, mu, budget)
    n = problem.n
    best_z, best_value = z, -math.inf
    for x in signs:
        candidate = np.concatenate([z[:n], x])
        value = problem.value(candidate, mu)
        if value > best_value:
            best_z, best_value = candidate, value
    return best_z, best_value, len(signs)


def maximize_defect(task: SearchTask) -> SearchResult:
    """Multi-start pattern search for the largest defect of ``task.objective``."""
    problem = _OBJECTIVE_TYPES[task.objective](task)
    streams = np.random.SeedSequence(task.seed).spawn(task.restarts)
    generators = [np.random.default_rng(s) for s in streams]
    contexts = [problem.context(rng) for rng in generators]

    evaluations = 0
    best_value, best_z, best_context = -math.inf, None, None
    start = None

    if task.objective == AUXILIARY:
        seeding_budget = task.budget // 4
        for z in problem.seed_points(contexts[0]):
            if evaluations >= seeding_budget:
                break
            z, value, used = _best_signs(problem, z, contexts[0], seeding_budget - evaluations)
            evaluations += used
            if value > best_value:
                best_value, best_z, best_context = value, z, contexts[0]
        start = best_z
        logger.debug("dipole seeding used %d evaluations, best defect %.6g", evaluations, best_value)

    history = []
    remaining = task.budget - evaluations
    per_restart = max(remaining // task.restarts, 1)
    for k, (rng, context) in enumerate(zip(generators, contexts)):
        restart_budget = min(per_restart if k < task.restarts - 1 else remaining, task.budget - evaluations)
        if restart_budget <= 0:
            break
        x0 = start if k == 0 and start is not None else problem.random_start(rng)
        result = pattern_search(lambda z: problem.value(z, context), x0, budget=restart_budget,
                                project=problem.project, extra_moves=problem.extra_moves, rng=rng)
        evaluations += result.evaluations
        remaining = task.budget - evaluations
        history.append(float(result.value))
        if result.value > best_value:
            best_value, best_z, best_context = result.value, result.x, context

    logger.info("%s n=%d p=%s: best defect %.6g after %d evaluations",
                task.objective, task.n, task.p, best_value, evaluations)
    return SearchResult(best_defect=float(best_value),
                        witness=problem.witness(best_z, best_context),
                        evaluations_used=evaluations,
                        history=history,
                        exhausted=evaluations >= task.budget)


def _witness_vector(witness: Dict[str, object], name: str) -> RandomVariable:
    return RandomVariable(parse_vector(witness[name]))


def _witness_matrix(witness: Dict[str, object], name: str) -> np.ndarray:
    return np.array([parse_vector(row) for row in witness[name]], dtype=complex)


def _witness_measure(task: SearchTask, witness: Dict[str, object]) -> DiscreteMeasure:
    return DiscreteMeasure(np.array(parse_vector(witness["weights"]), dtype=float))


def _scalar_report(task: SearchTask, mu: DiscreteMeasure, vectors: Dict[str, RandomVariable],
                   tolerance=None) -> DefectReport:
    if task.objective == LEIBNIZ:
        return leibniz_defect(vectors["f"], vectors["g"], mu, task.p, tolerance=tolerance)
    if task.objective == STRONG_LEIBNIZ:
        return strong_leibniz_defect(vectors["f"], mu, task.p, tolerance=tolerance)
    return auxiliary_defect(vectors["f"], vectors["x"], mu, task.p, tolerance=tolerance)


def _scalar_vectors(task: SearchTask, witness: Dict[str, object]) -> Dict[str, RandomVariable]:
    names = {LEIBNIZ: ("f", "g"), STRONG_LEIBNIZ: ("f",), AUXILIARY: ("f", "x")}[task.objective]
    return {name: _witness_vector(witness, name) for name in names}


def evaluate_witness(task: SearchTask, witness: Dict[str, object], tolerance=None) -> DefectReport:
    """Recompute the full defect report of a stored witness in floating point."""
    if task.objective == NC_PRODUCT:
        state = DensityState(_witness_matrix(witness, "rho"))
        return product_leibniz_nc_defect(_witness_matrix(witness, "a"), _witness_matrix(witness, "b"),
                                         state, PLAIN, tolerance=tolerance)
    return _scalar_report(task, _witness_measure(task, witness), _scalar_vectors(task, witness), tolerance)


def _sign(value) -> int:
    return (value > 0) - (value < 0)


def _exact_measure(task: SearchTask, witness: Dict[str, object]) -> DiscreteMeasure:
    if task.measure_family == UNIFORM:
        return DiscreteMeasure.uniform(task.n, exact=True)
    if task.measure_family == FIXED and all(isinstance(w, Fraction) for w in task.weights):
        return DiscreteMeasure(np.array(list(task.weights), dtype=object))
    return _witness_measure(task, witness).to_exact()


def exact_recertify(task: SearchTask, witness: Dict[str, object]) -> Recertification:
    """Rational re-evaluation; floats in the witness are read exactly."""
    mu = _exact_measure(task, witness)
    vectors = {name: v.to_exact() for name, v in _scalar_vectors(task, witness).items()}
    report = _scalar_report(task, mu, vectors, tolerance=Fraction(0))
    sign = report.certified_sign if report.certified_sign is not None else _sign(report.defect)
    return Recertification("exact", sign, format_scalar(report.defect))


def precise_recertify(task: SearchTask, witness: Dict[str, object]) -> Recertification:
    """Re-evaluation with mpmath at 60 significant digits."""
    with mpmath.workdps(PRECISE_DIGITS):
        mu = _exact_measure(task, witness).to_precise()
        vectors = {name: v.to_precise() for name, v in _scalar_vectors(task, witness).items()}
        report = _scalar_report(task, mu, vectors, tolerance=mpmath.mpf(0))
        return Recertification("precise", _sign(report.defect), format_scalar(report.defect))


def recertify(task: SearchTask, witness: Dict[str, object]) -> Optional[Recertification]:
    """Exact recertification for p in {1, 2, inf}, 60-digit otherwise; None for matrix objectives."""
    if task.objective == NC_PRODUCT:
        return None
    if task.p.is_infinite or task.p.value in (1, 2):
        return exact_recertify(task, witness)
    return precise_recertify(task, witness)


def _uniform_task(task: SearchTask) -> bool:
    if task.measure_family == UNIFORM:
        return True
    if task.measure_family == FIXED:
        return len({Fraction(str(w)) for w in task.weights}) == 1
    return False


def is_proved(task: SearchTask) -> bool:
    """
    True when the task's objective is a theorem on the searched instances, so a
    flagged defect there points at a bug rather than a counterexample.
    """
    p = task.p
    if task.objective in (LEIBNIZ, STRONG_LEIBNIZ):
        return p.is_infinite or p.value == 2 or (_uniform_task(task) and task.n <= 4)
    if task.objective == AUXILIARY:
        return p.is_infinite or task.n <= 2 or (_uniform_task(task) and task.n <= 4)
    # nc_product holds for tracial states only
    state = parse_state(task.state, task.d)
    return state is not None and state.is_tracial


@dataclass
class ExampleReport:
    """Exact values of an explicit counterexample next to the expected rationals."""

    name: str
    values: Dict[str, object]
    expected: Dict[str, object]
    report: DefectReport

    @property
    def matches(self) -> bool:
        return all(self.values[key] == value for key, value in self.expected.items())

    def to_dict(self) -> Dict[str, object]:
        def render(value):
            if isinstance(value, (list, tuple)):
                return format_vector(value)
            return format_scalar(value)

        return {
            "name": self.name,
            "values": {key: render(value) for key, value in self.values.items()},
            "expected": {key: render(value) for key, value in self.expected.items()},
            "matches": self.matches,
            "defect_report": self.report.to_dict(),
        }


def _exact_vector(values) -> RandomVariable:
    return RandomVariable(np.array([Fraction(v) for v in values], dtype=object))


def _auxiliary_values(f: RandomVariable, x: RandomVariable, mu: DiscreteMeasure) -> Dict[str, object]:
    mean_x = expectation(x, mu)
    mean_fx = expectation(f * x, mu)
    h = f.scaled(mean_x).shifted(-mean_fx)
    return {
        "E_f": expectation(f, mu),
        "E_x": mean_x,
        "E_fx": mean_fx,
        "vector": list(h.values),
    }


def reproduce_example1(n: int) -> ExampleReport:
    """
    f = (1, 0, ..., 0, -1) and x = (1, ..., 1, -1) on the uniform space with n
    atoms break the auxiliary inequality at p = 1 for every n >= 5.
    """
    if n < 5:
        raise PreconditionError(f"the construction exceeds the bound only for n >= 5, got n = {n}")
    mu = DiscreteMeasure.uniform(n, exact=True)
    f = _exact_vector([1] + [0] * (n - 2) + [-1])
    x = _exact_vector([1] * (n - 1) + [-1])
    report = auxiliary_defect(f, x, mu, 1)
    values = _auxiliary_values(f, x, mu)
    values.pop("vector")
    values.update(lhs=report.lhs, rhs=report.rhs, ratio=report.lhs / report.rhs)
    expected = {
        "E_x": 1 - Fraction(2, n),
        "E_fx": Fraction(2, n),
        "lhs": Fraction(4 * n - 8, n * n),
        "rhs": Fraction(2, n),
        "ratio": 2 - Fraction(4, n),
    }
    return ExampleReport(f"example1_n{n}", values, expected, report)


def reproduce_example2() -> ExampleReport:
    """The auxiliary inequality fails on a non-uniform three-point space at p = 1."""
    mu = DiscreteMeasure(np.array([Fraction(1, 8), Fraction(3, 4), Fraction(1, 8)], dtype=object))
    f = _exact_vector([1, 0, -1])
    x = _exact_vector([1, 1, -1])
    report = auxiliary_defect(f, x, mu, 1)
    values = _auxiliary_values(f, x, mu)
    values.update(lhs=report.lhs, rhs=report.rhs)
    expected = {
        "E_f": Fraction(0),
        "E_x": Fraction(3, 4),
        "E_fx": Fraction(1, 4),
        "vector": [Fraction(1, 2), Fraction(-1, 4), Fraction(-1)],
        "lhs": Fraction(3, 8),
        "rhs": Fraction(1, 4),
    }
    return ExampleReport("example2", values, expected, report)


@dataclass
class ScanResult:
    table: pd.DataFrame
    tasks: List[SearchTask]
    results: List[SearchResult]

    def flagged(self, include_diagnostic: bool = False) -> pd.DataFrame:
        rows = self.table[self.table["flagged"]]
        if not include_diagnostic:
            rows = rows[~rows["objective"].isin(DIAGNOSTIC_OBJECTIVES)]
        return rows


def conjecture_scan(n_values: Sequence[int], p_grid: Sequence, per_cell_budget: int, seed: int,
                    objectives: Sequence[str] = DEFAULT_SCAN_OBJECTIVES,
                    tolerance: float = DEFAULT_TOLERANCE, restarts: int = 20,
                    floor: float = 0.05) -> ScanResult:
    """
    Run maximize_defect on the uniform space for every (n, p, objective) cell.

    A cell is flagged when its defect exceeds ``tolerance`` and the
    recertified sign of its witness is positive.
    """
    rows, tasks, results = [], [], []
    exponents = [PExponent.coerce(p) for p in p_grid]
    for n in n_values:
        for p_index, p in enumerate(exponents):
            for o_index, objective in enumerate(objectives):
                cell_seed = int(np.random.SeedSequence([seed, n, p_index, o_index]).generate_state(1)[0])
                task = SearchTask(objective=objective, n=n, p=p, budget=per_cell_budget,
                                  seed=cell_seed, restarts=restarts, floor=floor)
                result = maximize_defect(task)
                flagged = result.best_defect > tolerance
                if flagged:
                    result.recertification = recertify(task, result.witness)
                    flagged = result.recertification is None or result.recertification.sign > 0
                    logger.info("cell n=%d p=%s %s flagged, recertified sign %s", n, p, objective,
                                None if result.recertification is None else result.recertification.sign)
                rows.append({"n": n, "p": str(p), "objective": objective,
                             "best_defect": result.best_defect, "flagged": bool(flagged)})
                tasks.append(task)
                results.append(result)
    table = pd.DataFrame(rows, columns=["n", "p", "objective", "best_defect", "flagged"])
    return ScanResult(table, tasks, results)
