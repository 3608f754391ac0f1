"""
Matrix algebras M_d with a faithful state omega(a) = trace(rho a).

The GNS space is M_d itself with <a, b> = omega(b* a). Matrices are
vectorized row by row; in those coordinates the inner product has Gram matrix
kron(I_d, rho^T), and operator norms on the GNS space are computed as largest
singular values after conjugating with its Cholesky factor.
"""

import logging
from dataclasses import dataclass, field
from typing import Callable, Dict, Optional, Sequence, Tuple

import numpy as np

from .errors import DimensionMismatchError, NonFaithfulStateError, NonInvertibleError, PreconditionError
from .inequalities import DEFAULT_TOLERANCE, DefectReport
from .prob_core import format_vector

logger = logging.getLogger(__name__)

STATE_TOLERANCE = 1e-12
DEFAULT_MAX_CONDITION = 1e6
DEFAULT_INVERTIBILITY_FLOOR = 1e-8

PLAIN = "plain"
MAX = "max"

# a d x d complex matrix paired with a state of the same dimension
AlgebraElement = np.ndarray


@dataclass(frozen=True, eq=False)
class DensityState:
    """A positive definite trace-one matrix rho."""

    rho: np.ndarray

    def __post_init__(self):
        rho = np.array(self.rho, dtype=complex)
        if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
            raise DimensionMismatchError(f"density matrix must be square, got shape {rho.shape}")
        if not np.allclose(rho, rho.conj().T, atol=STATE_TOLERANCE, rtol=0):
            raise NonFaithfulStateError("density matrix is not Hermitian")
        if abs(np.trace(rho) - 1) > STATE_TOLERANCE:
            raise NonFaithfulStateError(f"density matrix has trace {np.trace(rho).real!r}, not 1")
        rho = (rho + rho.conj().T) / 2
        if np.linalg.eigvalsh(rho).min() <= 0:
            raise NonFaithfulStateError("density matrix is not positive definite")
        object.__setattr__(self, "rho", rho)

    @classmethod
    def tracial(cls, d: int) -> "DensityState":
        """The normalized trace on M_d."""
        if d < 1:
            raise PreconditionError(f"d must be >= 1, got {d}")
        return cls(np.eye(d) / d)

    @classmethod
    def from_spectrum(cls, spectrum: Sequence[float]) -> "DensityState":
        """Diagonal state with the given (positive, renormalized) eigenvalues."""
        values = np.asarray(spectrum, dtype=float)
        if values.ndim != 1 or values.size < 1 or np.any(values <= 0):
            raise NonFaithfulStateError("a faithful spectrum needs positive entries")
        return cls(np.diag(values / values.sum()))

    @classmethod
    def random_faithful(cls, d: int, rng: np.random.Generator,
                        max_condition: float = DEFAULT_MAX_CONDITION) -> "DensityState":
        """rho = G G* / trace(G G*) for a random complex G, redrawn while badly conditioned."""
        while True:
            g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
            rho = g @ g.conj().T
            rho = (rho + rho.conj().T) / 2
            eigenvalues = np.linalg.eigvalsh(rho)
            if eigenvalues.min() > 0 and eigenvalues.max() / eigenvalues.min() <= max_condition:
                return cls(rho / np.trace(rho).real)
            logger.debug("rejected state with condition number %.3g", eigenvalues.max() / eigenvalues.min())

    @property
    def d(self) -> int:
        return int(self.rho.shape[0])

    @property
    def spectrum(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.rho)

    @property
    def is_tracial(self) -> bool:
        return bool(np.allclose(self.rho, np.eye(self.d) / self.d, atol=STATE_TOLERANCE, rtol=0))

    def describe(self) -> Dict[str, object]:
        return {"d": self.d, "tracial": self.is_tracial, "spectrum": format_vector(self.spectrum)}


def _element(a, w: DensityState) -> np.ndarray:
    matrix = np.asarray(a, dtype=complex)
    if matrix.shape != (w.d, w.d):
        raise DimensionMismatchError(f"element has shape {matrix.shape}, state has d = {w.d}")
    return matrix


def operator_norm(a: np.ndarray) -> float:
    """Largest singular value."""
    return float(np.linalg.norm(a, 2))


def state_apply(a: AlgebraElement, w: DensityState) -> complex:
    """omega(a) = trace(rho a)."""
    return complex(np.trace(w.rho @ _element(a, w)))


def l2_norm(a: AlgebraElement, w: DensityState) -> float:
    """||a||_2 = omega(a* a)^(1/2)."""
    a = _element(a, w)
    return float(np.sqrt(max(np.trace(w.rho @ a.conj().T @ a).real, 0.0)))


def nc_sigma2(a: AlgebraElement, w: DensityState) -> float:
    """||a - omega(a) 1||_2."""
    a = _element(a, w)
    return l2_norm(a - state_apply(a, w) * np.eye(w.d), w)


def nc_sigma2_max(a: AlgebraElement, w: DensityState) -> float:
    a = _element(a, w)
    return max(nc_sigma2(a, w), nc_sigma2(a.conj().T, w))


def _sigma(variant: str):
    if variant == PLAIN:
        return nc_sigma2
    if variant == MAX:
        return nc_sigma2_max
    raise PreconditionError(f"unknown variant {variant!r}, expected {PLAIN!r} or {MAX!r}")


@dataclass
class GnsGeometry:
    """Coordinates in which the GNS inner product becomes the standard one."""

    state: DensityState
    gram: np.ndarray = field(init=False)
    gram_factor: np.ndarray = field(init=False)
    gram_factor_inverse: np.ndarray = field(init=False)

    def __post_init__(self):
        d = self.state.d
        self.gram = np.kron(np.eye(d), self.state.rho.T)
        try:
            lower = np.linalg.cholesky(self.gram)
        except np.linalg.LinAlgError as e:
            raise NonFaithfulStateError(f"GNS form is not positive definite: {e}") from e
        self.gram_factor = lower.conj().T
        self.gram_factor_inverse = np.linalg.inv(self.gram_factor)

    @property
    def d(self) -> int:
        return self.state.d

    def inner(self, a: AlgebraElement, b: AlgebraElement) -> complex:
        """<a, b> = omega(b* a)."""
        va = _element(a, self.state).reshape(-1)
        vb = _element(b, self.state).reshape(-1)
        return complex(vb.conj() @ self.gram @ va)

    def norm(self, a: AlgebraElement) -> float:
        return float(np.linalg.norm(self.gram_factor @ _element(a, self.state).reshape(-1)))

    def left_multiplication(self, a: AlgebraElement) -> np.ndarray:
        """Matrix of b -> a b on row-major vectorizations."""
        return np.kron(_element(a, self.state), np.eye(self.d))

    def state_projection(self) -> np.ndarray:
        """Matrix of b -> omega(b) 1."""
        unit = np.eye(self.d).reshape(-1)
        return np.outer(unit, self.state.rho.T.reshape(-1))

    def operator_norm(self, matrix: np.ndarray) -> float:
        """Norm of a linear map on the GNS space, given on vectorizations."""
        return float(np.linalg.norm(self.gram_factor @ matrix @ self.gram_factor_inverse, 2))


def commutator_dirac_norm(a: AlgebraElement, w: DensityState, geometry: Optional[GnsGeometry] = None) -> float:
    """||[E, L_a]|| on the GNS space, with E the projection b -> omega(b) 1."""
    geometry = geometry or GnsGeometry(w)
    left = geometry.left_multiplication(a)
    projection = geometry.state_projection()
    return geometry.operator_norm(projection @ left - left @ projection)


def _format_matrix(a: np.ndarray):
    return [format_vector(row) for row in a]


def _inputs(w: DensityState, **elements) -> Dict[str, object]:
    data = {name: _format_matrix(np.asarray(m)) for name, m in elements.items()}
    data.update(w.describe())
    return data


def _report(name: str, lhs: float, rhs: float, inputs: Dict[str, object],
            tolerance: Optional[float]) -> DefectReport:
    return DefectReport(name, lhs, rhs, DEFAULT_TOLERANCE if tolerance is None else tolerance, inputs)


def lemma_defect(a: AlgebraElement, x: AlgebraElement, w: DensityState,
                 tolerance: Optional[float] = None) -> DefectReport:
    """||omega(x) a - omega(x a) 1||_2 <= ||x|| ||a - omega(a)||_2."""
    a = _element(a, w)
    x = _element(x, w)
    h = state_apply(x, w) * a - state_apply(x @ a, w) * np.eye(w.d)
    return _report("nc_lemma", l2_norm(h, w), operator_norm(x) * nc_sigma2(a, w),
                   _inputs(w, a=a, x=x), tolerance)


def module_bound_defect(x: AlgebraElement, a: AlgebraElement, w: DensityState,
                        tolerance: Optional[float] = None) -> DefectReport:
    """||x a||_2 <= ||x|| ||a||_2."""
    a = _element(a, w)
    x = _element(x, w)
    return _report("nc_module_bound", l2_norm(x @ a, w), operator_norm(x) * l2_norm(a, w),
                   _inputs(w, x=x, a=a), tolerance)


def inverse_inequality_defect(a: AlgebraElement, w: DensityState, variant: str = PLAIN,
                              floor: float = DEFAULT_INVERTIBILITY_FLOOR,
                              tolerance: Optional[float] = None) -> DefectReport:
    """sigma(a^-1) <= ||a^-1||^2 sigma(a), for sigma the plain or the max variant."""
    sigma = _sigma(variant)
    a = _element(a, w)
    smallest = np.linalg.svd(a, compute_uv=False).min()
    if smallest <= floor:
        raise NonInvertibleError(f"smallest singular value {smallest:.3g} is below the floor {floor:.3g}")
    inverse = np.linalg.inv(a)
    inverse_norm = operator_norm(inverse)
    inputs = _inputs(w, a=a)
    inputs["variant"] = variant
    return _report(f"nc_inverse_{variant}", sigma(inverse, w), inverse_norm ** 2 * sigma(a, w), inputs, tolerance)


def product_leibniz_nc_defect(a: AlgebraElement, b: AlgebraElement, w: DensityState, variant: str = PLAIN,
                              tolerance: Optional[float] = None) -> DefectReport:
    """sigma(a b) <= ||a|| sigma(b) + ||b|| sigma(a); the state's tracial flag is recorded."""
    sigma = _sigma(variant)
    a = _element(a, w)
    b = _element(b, w)
    lhs = sigma(a @ b, w)
    rhs = operator_norm(a) * sigma(b, w) + operator_norm(b) * sigma(a, w)
    inputs = _inputs(w, a=a, b=b)
    inputs["variant"] = variant
    return _report(f"nc_product_{variant}", lhs, rhs, inputs, tolerance)


def random_element(d: int, rng: np.random.Generator) -> np.ndarray:
    return rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))


def random_contraction(d: int, rng: np.random.Generator) -> np.ndarray:
    """A random matrix scaled to operator norm 1."""
    x = random_element(d, rng)
    return x / operator_norm(x)


@dataclass
class DerivationNorm:
    """
    Norms in the direct sum M_d + L^2(M_d, omega) with ||(x, y)|| = max(||x||, ||y||_2).

    sampled_sup is the sampled sup over ||x|| = 1 of ||omega(x) a - omega(x a)||_2,
    closed_form is sigma_2(a). t_norm_witness is ||T_a(1, 0)|| and t_norm_sample_max
    the largest ||T_a(x, y)|| over sampled unit vectors. composition_error is the
    largest deviation of T_b(T_a(x, y)) from T_ab(x, y) and reversed_composition_error
    the same for T_a(T_b(x, y)); only the first vanishes for noncommuting a, b.
    """

    sampled_sup: float
    closed_form: float
    operator_norm: float
    t_norm_witness: float
    t_norm_sample_max: float
    composition_error: float
    reversed_composition_error: float

    def as_pair(self):
        return self.sampled_sup, self.closed_form


Pair = Tuple[np.ndarray, np.ndarray]


def _direct_sum_norm(x: np.ndarray, y: np.ndarray, w: DensityState) -> float:
    return max(operator_norm(x), l2_norm(y, w))


def right_multiplication(c: np.ndarray) -> Callable[[Pair], Pair]:
    """T_c(x, y) = (x c, y c) on the direct sum."""
    def apply(pair: Pair) -> Pair:
        x, y = pair
        return x @ c, y @ c
    return apply


def _pair_distance(u: Pair, v: Pair, w: DensityState) -> float:
    return _direct_sum_norm(u[0] - v[0], u[1] - v[1], w)


def derivation_construct_norm(a: AlgebraElement, w: DensityState, samples: int = 200,
                              seed: int = 0) -> DerivationNorm:
    """
    Sampled norms of the derivation construction for a tracial state, where
    E(x, y) = (0, omega(x) 1) and T_a(x, y) = (x a, y a).

    Right multiplication reverses products: T_ab = T_b T_a.
    """
    if not w.is_tracial:
        raise PreconditionError("the derivation construction needs a tracial state")
    a = _element(a, w)
    d = w.d
    rng = np.random.default_rng(seed)
    identity = np.eye(d)
    t_a = right_multiplication(a)

    def commutator_value(x):
        return l2_norm(state_apply(x, w) * a - state_apply(x @ a, w) * identity, w)

    sampled_sup = commutator_value(identity)
    t_norm_witness = _direct_sum_norm(*t_a((identity, np.zeros((d, d)))), w)
    t_norm_sample_max = t_norm_witness
    composition_error = reversed_error = 0.0
    for _ in range(samples):
        x = random_contraction(d, rng)
        sampled_sup = max(sampled_sup, commutator_value(x))

        y = random_element(d, rng)
        y = y / l2_norm(y, w)
        if rng.random() < 0.5:
            x = x * rng.uniform(0.0, 1.0)
        else:
            y = y * rng.uniform(0.0, 1.0)
        t_norm_sample_max = max(t_norm_sample_max, _direct_sum_norm(*t_a((x, y)), w))

        b = random_element(d, rng)
        t_b, t_ab = right_multiplication(b), right_multiplication(a @ b)
        direct = t_ab((x, y))
        composition_error = max(composition_error, _pair_distance(t_b(t_a((x, y))), direct, w))
        reversed_error = max(reversed_error, _pair_distance(t_a(t_b((x, y))), direct, w))

    return DerivationNorm(sampled_sup=sampled_sup, closed_form=nc_sigma2(a, w),
                          operator_norm=operator_norm(a), t_norm_witness=t_norm_witness,
                          t_norm_sample_max=t_norm_sample_max, composition_error=composition_error,
                          reversed_composition_error=reversed_error)
