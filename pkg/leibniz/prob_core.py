"""
Discrete probability spaces, expectations, weighted p-norms and centered moments.

One code path serves three arithmetic backends, selected by the element type
of the value arrays:

    float    numpy float64 / complex128 arrays (default)
    exact    object arrays of fractions.Fraction
    precise  object arrays of mpmath.mpf (used for recertification)

Exact mode is closed under every operation here for p = 1, p = inf and the
p-th powers of integer p; roots leave it (see ``p_norm_power``).
"""

import math
from dataclasses import dataclass
from fractions import Fraction
from math import lcm
from typing import Iterable, List, Optional, Union

import mpmath
import numpy as np

from .errors import (
    DimensionMismatchError,
    NonInvertibleError,
    PreconditionError,
    UnsupportedExponentError,
)

Scalar = Union[float, complex, Fraction, mpmath.mpf]

WEIGHT_SUM_TOLERANCE = 1e-12

REAL = "real"
COMPLEX = "complex"


def _as_values(values) -> np.ndarray:
    """Coerce a sequence into a 1-D array of one backend."""
    if isinstance(values, np.ndarray) and values.dtype != object:
        array = values
    else:
        items = list(values)
        if any(isinstance(v, Fraction) for v in items):
            try:
                array = np.array([Fraction(v) for v in items], dtype=object)
            except TypeError as e:
                raise PreconditionError(f"exact values must be rational: {e}") from e
        elif any(isinstance(v, mpmath.mpf) for v in items):
            array = np.array([mpmath.mpf(v) for v in items], dtype=object)
        else:
            array = np.asarray(items)
    if array.dtype.kind in "iub":
        array = array.astype(float)
    if array.ndim != 1:
        raise PreconditionError(f"expected a vector, got shape {array.shape}")
    return array


def backend_of(values: np.ndarray) -> str:
    """Name of the arithmetic backend an array belongs to."""
    if values.dtype != object or values.size == 0:
        return "float"
    if isinstance(values[0], mpmath.mpf):
        return "precise"
    return "exact"


def _scalar(x):
    if isinstance(x, np.generic):
        return x.item()
    return x


@dataclass(frozen=True)
class PExponent:
    """An exponent p in [1, inf]; ``math.inf`` is the distinguished value."""

    value: float

    def __post_init__(self):
        value = float(self.value)
        if math.isnan(value) or value < 1:
            raise UnsupportedExponentError(f"p must lie in [1, inf], got {self.value}")
        object.__setattr__(self, "value", value)

    @classmethod
    def parse(cls, text: str) -> "PExponent":
        token = text.strip().lower()
        if token in ("inf", "infinity", "∞"):
            return cls(math.inf)
        try:
            return cls(float(token))
        except ValueError as e:
            raise UnsupportedExponentError(f"cannot parse exponent {text!r}") from e

    @classmethod
    def coerce(cls, p) -> "PExponent":
        if isinstance(p, PExponent):
            return p
        if isinstance(p, str):
            return cls.parse(p)
        return cls(p)

    @property
    def is_infinite(self) -> bool:
        return math.isinf(self.value)

    @property
    def power(self) -> Union[int, float]:
        """The exponent as an int when integral, so Fractions stay exact."""
        if self.value.is_integer():
            return int(self.value)
        return self.value

    def conjugate(self) -> "PExponent":
        """The exponent q with 1/p + 1/q = 1."""
        if self.is_infinite:
            return PExponent(1)
        if self.value == 1:
            return PExponent(math.inf)
        return PExponent(self.value / (self.value - 1))

    def __str__(self) -> str:
        if self.is_infinite:
            return "inf"
        if self.value.is_integer():
            return str(int(self.value))
        return repr(self.value)


@dataclass(frozen=True, eq=False)
class DiscreteMeasure:
    """A probability vector on the atoms 1..n."""

    weights: np.ndarray

    def __post_init__(self):
        weights = _as_values(self.weights)
        if weights.dtype.kind == "c":
            raise PreconditionError("measure weights must be real")
        if weights.size < 1:
            raise PreconditionError("a measure needs at least one atom")
        if any(w < 0 for w in weights):
            raise PreconditionError("measure weights must be non-negative")
        total = weights.sum()
        if backend_of(weights) == "exact":
            if total != 1:
                raise PreconditionError(f"exact weights sum to {total}, not 1")
        elif abs(float(total) - 1.0) > WEIGHT_SUM_TOLERANCE:
            raise PreconditionError(f"weights sum to {float(total)!r}, not 1")
        object.__setattr__(self, "weights", weights)

    @classmethod
    def uniform(cls, n: int, exact: bool = False) -> "DiscreteMeasure":
        """The uniform distribution on n atoms."""
        if n < 1:
            raise PreconditionError(f"n must be >= 1, got {n}")
        if exact:
            return cls(np.array([Fraction(1, n)] * n, dtype=object))
        return cls(np.full(n, 1.0 / n))

    @property
    def n(self) -> int:
        return int(self.weights.size)

    @property
    def backend(self) -> str:
        return backend_of(self.weights)

    @property
    def is_exact(self) -> bool:
        return self.backend == "exact"

    def support(self) -> np.ndarray:
        """Boolean mask of atoms with positive weight."""
        return np.array([w > 0 for w in self.weights], dtype=bool)

    def is_uniform(self) -> bool:
        first = self.weights[0]
        return all(w == first for w in self.weights)

    def common_denominator(self) -> int:
        """Least m with every weight of the form r/m (exact measures only)."""
        if not self.is_exact:
            raise PreconditionError("common denominator needs an exact measure")
        return lcm(*(w.denominator for w in self.weights))

    def to_exact(self) -> "DiscreteMeasure":
        """Exact copy; float weights are read exactly and renormalized."""
        if self.is_exact:
            return self
        fractions = [Fraction(float(w)) for w in self.weights]
        total = sum(fractions)
        return DiscreteMeasure(np.array([w / total for w in fractions], dtype=object))

    def to_precise(self) -> "DiscreteMeasure":
        """mpmath copy at the current working precision."""
        if self.is_exact:
            values = [mpmath.mpf(w.numerator) / w.denominator for w in self.weights]
        else:
            values = [mpmath.mpf(float(w)) for w in self.weights]
        total = mpmath.fsum(values)
        return DiscreteMeasure(np.array([v / total for v in values], dtype=object))

    def to_float(self) -> "DiscreteMeasure":
        if self.backend == "float":
            return self
        return DiscreteMeasure(np.array([float(w) for w in self.weights]))


@dataclass(frozen=True, eq=False)
class RandomVariable:
    """A scalar function on the atoms, tagged real or complex."""

    values: np.ndarray
    scalar_field: Optional[str] = None

    def __post_init__(self):
        values = _as_values(self.values)
        is_complex = values.dtype.kind == "c"
        field = self.scalar_field or (COMPLEX if is_complex else REAL)
        if field not in (REAL, COMPLEX):
            raise PreconditionError(f"unknown scalar field {field!r}")
        if field == REAL and is_complex:
            if np.any(values.imag != 0):
                raise PreconditionError("complex values in a real random variable")
            values = values.real.copy()
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "scalar_field", field)

    @property
    def n(self) -> int:
        return int(self.values.size)

    @property
    def backend(self) -> str:
        return backend_of(self.values)

    @property
    def is_real(self) -> bool:
        return self.scalar_field == REAL

    def require_real(self, what: str = "this operation"):
        if not self.is_real:
            raise PreconditionError(f"{what} needs a real-valued random variable")

    def _combine_field(self, other: "RandomVariable") -> str:
        return REAL if self.is_real and other.is_real else COMPLEX

    def __mul__(self, other: "RandomVariable") -> "RandomVariable":
        if not isinstance(other, RandomVariable):
            return NotImplemented
        if other.n != self.n:
            raise DimensionMismatchError(f"cannot multiply vectors of length {self.n} and {other.n}")
        return RandomVariable(self.values * other.values, self._combine_field(other))

    def reciprocal(self) -> "RandomVariable":
        """Pointwise 1/f; every coordinate must be non-zero."""
        if any(v == 0 for v in self.values):
            raise NonInvertibleError("random variable has a zero coordinate")
        if self.backend == "float":
            return RandomVariable(1.0 / self.values, self.scalar_field)
        return RandomVariable(np.array([1 / v for v in self.values], dtype=object), self.scalar_field)

    def shifted(self, c) -> "RandomVariable":
        field = self.scalar_field if not isinstance(c, complex) else COMPLEX
        return RandomVariable(self.values + c, field)

    def scaled(self, alpha) -> "RandomVariable":
        field = self.scalar_field if not isinstance(alpha, complex) else COMPLEX
        return RandomVariable(self.values * alpha, field)

    def to_exact(self) -> "RandomVariable":
        """Exact copy; floats are read exactly (complex values are rejected)."""
        if self.backend == "exact":
            return self
        self.require_real("exact mode")
        return RandomVariable(np.array([Fraction(float(v)) for v in self.values], dtype=object))

    def to_precise(self) -> "RandomVariable":
        self.require_real("precise mode")
        if self.backend == "exact":
            items = [mpmath.mpf(v.numerator) / v.denominator for v in self.values]
        else:
            items = [mpmath.mpf(float(v)) for v in self.values]
        return RandomVariable(np.array(items, dtype=object))

    def to_float(self) -> "RandomVariable":
        if self.backend == "float":
            return self
        dtype = float if self.is_real else complex
        return RandomVariable(np.array([dtype(v) for v in self.values]), self.scalar_field)


def constant(c, n: int) -> RandomVariable:
    """The constant random variable c on n atoms."""
    return RandomVariable([c] * n)


def _check_dims(f: RandomVariable, mu: DiscreteMeasure):
    if f.n != mu.n:
        raise DimensionMismatchError(
            f"random variable has {f.n} coordinates but the measure has {mu.n} atoms")


def expectation(f: RandomVariable, mu: DiscreteMeasure) -> Scalar:
    """E f = sum_i w_i f_i."""
    _check_dims(f, mu)
    return _scalar((mu.weights * f.values).sum())


def centered(f: RandomVariable, mu: DiscreteMeasure) -> RandomVariable:
    """f - E f."""
    return f.shifted(-expectation(f, mu))


def p_norm_power(f: RandomVariable, mu: DiscreteMeasure, p) -> Scalar:
    """sum_i w_i |f_i|^p for finite p; exact for integer p in exact mode."""
    p = PExponent.coerce(p)
    if p.is_infinite:
        raise UnsupportedExponentError("p-th power sum is undefined for p = inf")
    _check_dims(f, mu)
    magnitudes = np.abs(f.values)
    return _scalar((mu.weights * magnitudes ** p.power).sum())


def _root(power, p: PExponent):
    if p.value == 1:
        return power
    if isinstance(power, mpmath.mpf):
        return mpmath.power(power, 1 / mpmath.mpf(p.value))
    return float(power) ** (1.0 / p.value)


def p_norm(f: RandomVariable, mu: DiscreteMeasure, p) -> Scalar:
    """Weighted L^p norm; p = inf is the essential supremum over atoms of positive weight."""
    p = PExponent.coerce(p)
    _check_dims(f, mu)
    if p.is_infinite:
        return _scalar(np.abs(f.values[mu.support()]).max())
    return _root(p_norm_power(f, mu, p), p)


def sup_norm(f: RandomVariable) -> Scalar:
    """max_i |f_i| over every coordinate, weighted or not."""
    if f.n == 0:
        return 0.0
    return _scalar(np.abs(f.values).max())


def centered_moment(f: RandomVariable, mu: DiscreteMeasure, p) -> Scalar:
    """sigma_p(f; mu) = ||f - E f||_p."""
    return p_norm(centered(f, mu), mu, p)


def centered_moment_power(f: RandomVariable, mu: DiscreteMeasure, p) -> Scalar:
    """sigma_p(f; mu)^p without taking the root."""
    return p_norm_power(centered(f, mu), mu, p)


def format_scalar(x) -> str:
    """Serialize a scalar: exact rationals as "num/den", floats as round-trip decimals."""
    x = _scalar(x)
    if isinstance(x, bool):
        return str(x).lower()
    if isinstance(x, Fraction):
        return f"{x.numerator}/{x.denominator}"
    if isinstance(x, int):
        return f"{x}/1"
    if isinstance(x, mpmath.mpf):
        return mpmath.nstr(x, 30)
    if isinstance(x, complex):
        return repr(x)
    value = float(x)
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    return repr(value)


def format_vector(values: Iterable) -> List[str]:
    return [format_scalar(v) for v in values]


def parse_scalar(text: str):
    """Inverse of ``format_scalar`` for rationals, floats and complex numbers."""
    token = text.strip()
    if "/" in token:
        return Fraction(token)
    if token.endswith("j") or token.endswith("j)"):
        return complex(token)
    return float(token)


def parse_vector(items: Iterable[str]) -> list:
    return [parse_scalar(item) for item in items]
