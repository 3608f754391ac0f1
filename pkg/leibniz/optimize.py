"""
Derivative-free maximizers shared by the projection and search modules.

Both routines maximize; callers that need a minimum negate their objective.
"""

import logging
from dataclasses import dataclass
from math import sqrt
from typing import Callable, Iterable, Optional, Tuple

import numpy as np

logger = logging.getLogger(__name__)

PHI_RATIO = 2 / (1 + sqrt(5))


def golden_section_max(f: Callable[[float], float], lower: float, upper: float,
                       tol: float = 1e-12, max_iterations: int = 200) -> Tuple[float, float]:
    """
    Golden-section search for the maximum of a unimodal function on [lower, upper].

    Returns (argmax, max). The bracket end points are compared as well, so a
    maximum sitting on the boundary is not lost.
    """
    x1 = upper - PHI_RATIO * (upper - lower)
    x2 = lower + PHI_RATIO * (upper - lower)
    f1 = f(x1)
    f2 = f(x2)
    lower0, upper0 = lower, upper
    iteration = 0
    while iteration < max_iterations and abs(upper - lower) > tol:
        if f1 > f2:
            upper = x2
            x2, f2 = x1, f1
            x1 = upper - PHI_RATIO * (upper - lower)
            f1 = f(x1)
        else:
            lower = x1
            x1, f1 = x2, f2
            x2 = lower + PHI_RATIO * (upper - lower)
            f2 = f(x2)
        iteration += 1

    candidates = [(f1, x1), (f2, x2), (f(lower0), lower0), (f(upper0), upper0)]
    best_value, best_x = max(candidates, key=lambda item: item[0])
    return best_x, best_value


@dataclass
class PatternSearchResult:
    x: np.ndarray
    value: float
    evaluations: int
    final_step: float


def pattern_search(objective: Callable[[np.ndarray], float], x0: np.ndarray, *,
                   budget: int, step: float = 0.5, min_step: float = 1e-9,
                   shrink: float = 0.5,
                   project: Optional[Callable[[np.ndarray], np.ndarray]] = None,
                   extra_moves: Optional[Callable[[np.ndarray], Iterable[np.ndarray]]] = None,
                   rng: Optional[np.random.Generator] = None) -> PatternSearchResult:
    """
    Coordinate pattern search maximizing ``objective``.

    Each sweep tries x +/- step along every coordinate (in a random order when
    ``rng`` is given) and then any candidates produced by ``extra_moves``; the
    first improvement is taken. A sweep without improvement shrinks the step.
    ``project`` maps every trial point back into the feasible set.
    """
    project = project or (lambda z: z)
    x = project(np.array(x0, dtype=float))
    fx = objective(x)
    evaluations = 1

    while evaluations < budget and step >= min_step:
        improved = False
        order = rng.permutation(x.size) if rng is not None else range(x.size)
        for i in order:
            for direction in (1.0, -1.0):
                if evaluations >= budget:
                    break
                y = x.copy()
                y[i] += direction * step
                y = project(y)
                if np.array_equal(y, x):
                    continue
                fy = objective(y)
                evaluations += 1
                if fy > fx:
                    x, fx, improved = y, fy, True
                    break
        if extra_moves is not None:
            for y in extra_moves(x):
                if evaluations >= budget:
                    break
                y = project(y)
                fy = objective(y)
                evaluations += 1
                if fy > fx:
                    x, fx, improved = y, fy, True
                    break
        if not improved:
            step *= shrink

    logger.debug("pattern search stopped after %d evaluations at step %.3g", evaluations, step)
    return PatternSearchResult(x=x, value=fx, evaluations=evaluations, final_step=step)
