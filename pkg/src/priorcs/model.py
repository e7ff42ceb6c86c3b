"""Signals, supports, support estimates, weights and noise descriptions.

Indices are 0-based throughout. The estimate profile ``(rho, alpha, beta)``
is kept in exact rational arithmetic so that ``alpha + beta == 1`` holds
exactly and cardinalities like ``rho * k`` can be checked for integrality.
"""

import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from numbers import Rational

import numpy as np

from .linalg import as_vector


class ModelError(ValueError):
    """Invalid support, estimate or noise description."""


def as_fraction(value, name="value"):
    """Exact rational view of an int, Fraction, float or ``"p/q"`` string."""
    if isinstance(value, bool):
        raise ModelError(f"{name} must be numeric, got bool")
    if isinstance(value, Rational):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value)
        except (ValueError, ZeroDivisionError) as exc:
            raise ModelError(f"{name}: cannot parse {value!r} as a rational") from exc
    f = float(value)
    if not math.isfinite(f):
        raise ModelError(f"{name} must be finite")
    # Short decimal inputs like 0.75 or 1/3-ish floats keep their intended value.
    return Fraction(f).limit_denominator(10**9) if f != 0 else Fraction(0)


def as_index_set(indices, N=None, name="index set"):
    """Sorted tuple of distinct ints, optionally range-checked against ``N``."""
    idx = sorted({int(i) for i in indices})
    if N is not None and idx and (idx[0] < 0 or idx[-1] >= N):
        raise ModelError(f"{name} has indices outside [0, {N})")
    return tuple(idx)


@dataclass(frozen=True)
class SupportEstimate:
    """A prior guess ``T~`` of the signal support inside ``range(N)``."""

    indices: tuple
    N: int

    def __post_init__(self):
        if self.N < 1:
            raise ModelError("ambient dimension N must be positive")
        object.__setattr__(self, "indices", as_index_set(self.indices, self.N, "estimate"))

    def __len__(self):
        return len(self.indices)

    def __iter__(self):
        return iter(self.indices)

    def __contains__(self, i):
        return i in set(self.indices)

    def mask(self):
        m = np.zeros(self.N, dtype=bool)
        m[list(self.indices)] = True
        return m


@dataclass(frozen=True)
class EstimateProfile:
    """``rho = |T~|/k``, ``alpha = |T~ & T0|/|T~|`` and ``beta = 1 - alpha``."""

    rho: Fraction
    alpha: Fraction
    beta: Fraction

    def __post_init__(self):
        if self.rho < 0 or not 0 <= self.alpha <= 1 or self.alpha + self.beta != 1:
            raise ModelError(f"inconsistent profile {self}")


@dataclass(frozen=True)
class WeightVector:
    """Two-level weights: ``omega`` on the estimate, 1 elsewhere."""

    omega: float
    estimate: SupportEstimate
    w: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if not 0.0 <= self.omega <= 1.0:
            raise ModelError(f"omega must lie in [0, 1], got {self.omega}")
        w = np.ones(self.estimate.N)
        w[list(self.estimate.indices)] = self.omega
        w.flags.writeable = False
        object.__setattr__(self, "w", w)

    def __array__(self, dtype=None, copy=None):
        return np.array(self.w, dtype=dtype)


def make_weights(estimate, omega):
    return WeightVector(float(omega), estimate)


class NoiseKind(str, Enum):
    EXACT = "exact"
    L2 = "l2"
    DANTZIG = "dantzig"
    GAUSSIAN = "gaussian"


@dataclass(frozen=True)
class NoiseSpec:
    """Noise model plus the radius handed to the solver.

    ``epsilon`` bounds the actual noise (in the norm matching ``kind``),
    ``eta`` is the constraint radius used by the solver (``eta >= epsilon``)
    and ``sigma`` is the standard deviation for Gaussian noise.
    """

    kind: NoiseKind = NoiseKind.EXACT
    epsilon: float = 0.0
    eta: float = 0.0
    sigma: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "kind", NoiseKind(self.kind))
        if min(self.epsilon, self.eta, self.sigma) < 0:
            raise ModelError("noise parameters must be nonnegative")
        if self.kind is NoiseKind.EXACT and (self.epsilon != 0 or self.eta != 0):
            raise ModelError("exact measurements require epsilon = eta = 0")
        if self.kind in (NoiseKind.L2, NoiseKind.DANTZIG) and self.eta < self.epsilon:
            raise ModelError(f"solver radius eta={self.eta} is below epsilon={self.epsilon}")


@dataclass(frozen=True)
class SignalInstance:
    x: np.ndarray
    k: int

    def __post_init__(self):
        x = as_vector(self.x)
        if not 1 <= self.k <= x.size:
            raise ModelError(f"k={self.k} outside [1, {x.size}]")
        object.__setattr__(self, "x", x)

    @property
    def support(self):
        return best_k_support(self.x, self.k)


def best_k_support(x, k):
    """Indices of the ``k`` largest-magnitude entries of ``x``.

    Ties are broken towards the lowest index. When ``x`` has fewer than
    ``k`` nonzeros the set is padded with the lowest-index zero entries, so
    the result always has exactly ``k`` elements.
    """
    x = as_vector(x)
    if not 1 <= k <= x.size:
        raise ModelError(f"k={k} outside [1, {x.size}]")
    order = np.lexsort((np.arange(x.size), -np.abs(x)))
    return tuple(sorted(int(i) for i in order[:k]))


def best_k_approx(x, k):
    """``x_max(k)``: ``x`` with everything outside :func:`best_k_support` zeroed."""
    x = as_vector(x)
    out = np.zeros_like(x)
    T0 = list(best_k_support(x, k))
    out[T0] = x[T0]
    return out


def restrict(x, indices):
    """``x_T``: copy of ``x`` that is zero off ``indices``."""
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    idx = list(indices)
    out[idx] = x[idx]
    return out


def _integral(value, what):
    if value.denominator != 1:
        raise ModelError(f"{what} = {value} is not an integer")
    return int(value)


def make_estimate(T0, rho, alpha, k, N, seed=0):
    """Draw a support estimate with prescribed ``(rho, alpha)``.

    ``rho * k`` indices are chosen, ``alpha * rho * k`` of them uniformly
    from ``T0`` and the rest uniformly from its complement.
    """
    rho = as_fraction(rho, "rho")
    alpha = as_fraction(alpha, "alpha")
    T0 = as_index_set(T0, N, "T0")
    if rho < 0 or not 0 <= alpha <= 1:
        raise ModelError("need rho >= 0 and 0 <= alpha <= 1")
    size = _integral(rho * k, "rho*k")
    good = _integral(alpha * rho * k, "alpha*rho*k")
    bad = size - good
    comp = sorted(set(range(N)) - set(T0))
    if good > len(T0):
        raise ModelError(f"alpha*rho*k = {good} exceeds |T0| = {len(T0)}")
    if bad > len(comp):
        raise ModelError(f"(1-alpha)*rho*k = {bad} exceeds N - |T0| = {len(comp)}")
    rng = np.random.default_rng(seed)
    chosen = list(rng.choice(T0, size=good, replace=False)) if good else []
    chosen += list(rng.choice(comp, size=bad, replace=False)) if bad else []
    return SupportEstimate(tuple(int(i) for i in chosen), N)


def profile_of(T0, estimate, k):
    """Exact ``(rho, alpha, beta)`` of ``estimate`` relative to ``T0``.

    An empty estimate is reported as fully accurate (``alpha = 1``).
    """
    if k < 1:
        raise ModelError("k must be positive")
    T0 = set(as_index_set(T0, estimate.N, "T0"))
    size = len(estimate)
    rho = Fraction(size, k)
    alpha = Fraction(len(T0.intersection(estimate.indices)), size) if size else Fraction(1)
    return EstimateProfile(rho, alpha, 1 - alpha)


def double_bracket(zeta):
    """The integer ``n`` with ``zeta <= n < zeta + 1``, i.e. ``ceil(zeta)``."""
    if zeta < 0:
        raise ModelError(f"double bracket needs zeta >= 0, got {zeta}")
    if isinstance(zeta, Rational):
        return math.ceil(Fraction(zeta))
    return math.ceil(float(zeta))


def weighted_norm(x, w):
    """``sum_i w_i |x_i|``."""
    x = np.asarray(x, dtype=float)
    w = np.asarray(w, dtype=float)
    if x.shape != w.shape:
        raise ModelError(f"dimension mismatch: x {x.shape} vs w {w.shape}")
    return float(np.sum(w * np.abs(x)))
