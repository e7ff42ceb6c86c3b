"""Recovery-guarantee constants for weighted and standard l1 minimization.

Given ``(k, a, b, omega, rho, alpha)`` and the matrix constants
``delta_a``, ``theta_{a,b}``, this module evaluates the order parameter
``s``, the dimension ``d``, the condition constant ``C^{alpha,omega}_{a,b,k}``,
the error-bound constants for the l2-ball and Dantzig-selector programs,
and their standard-l1 counterparts (``s -> 2k - a``, ``d -> k``).

``s`` is computed in exact arithmetic: ``(1 + rho - 2 alpha rho) k`` is the
integer ``k + |T~| - 2|T~ & T0|``, so the only irrational piece is a single
square root, and the ceiling is resolved by exact comparison.
"""

import functools
import math
from dataclasses import dataclass, field, replace
from enum import Enum
from fractions import Fraction

import numpy as np

from .model import NoiseKind, as_fraction, as_index_set

#: Margin used when asserting the strict inequalities of the comparison cases.
STRICT_MARGIN = 1e-12


class BoundsError(ValueError):
    """Inputs violating the integrality or range requirements."""


class NoGuaranteeError(BoundsError):
    """Raised when an error bound is requested but the condition fails."""


def _check(k, a, omega, rho, alpha):
    if k < 1 or not 1 <= a <= k:
        raise BoundsError(f"need 1 <= a <= k, got a={a}, k={k}")
    omega = as_fraction(omega, "omega")
    rho = as_fraction(rho, "rho")
    alpha = as_fraction(alpha, "alpha")
    if not 0 <= omega <= 1:
        raise BoundsError(f"omega={omega} outside [0, 1]")
    if rho < 0 or not 0 <= alpha <= 1:
        raise BoundsError("need rho >= 0 and 0 <= alpha <= 1")
    size, good = rho * k, alpha * rho * k
    if size.denominator != 1 or good.denominator != 1:
        raise BoundsError(f"rho*k={size} and alpha*rho*k={good} must be integers")
    if good > k:
        raise BoundsError(f"alpha*rho*k={good} exceeds k={k}: |T~ & T0| <= |T0| <= k")
    # (1 + rho - 2 alpha rho) k = |T0 u T~ minus T~_alpha| is a nonnegative integer
    m = k + int(size) - 2 * int(good)
    return omega, rho, alpha, m


def _ceil_plus_sqrt(r, c, t):
    """Exact ``ceil(r + c*sqrt(t))`` for rationals ``r``, ``c >= 0`` and int ``t >= 0``."""
    guess = math.ceil(float(r) + float(c) * math.sqrt(t))
    for n in range(guess - 2, guess + 3):
        gap = n - r
        if gap >= 0 and gap * gap >= c * c * t:
            return n
    raise ArithmeticError("ceiling search failed")  # pragma: no cover


def _key(v):
    # Fraction hashing is slow; key rationals by their (numerator, denominator)
    return (v.numerator, v.denominator) if isinstance(v, Fraction) else v


def _unkey(v):
    return Fraction(*v) if isinstance(v, tuple) else v


def compute_s(k, a, omega, rho, alpha):
    """Order parameter ``s`` of the weighted condition.

    ``s = [[k - a + omega k + (1-omega) sqrt(mk) max(sqrt(mk), sqrt(a))]]`` with
    ``mk = (1 + rho - 2 alpha rho) k``. The bracket is the ceiling. The result
    is floored at 1 (it can only reach 0 when ``a = k`` and the estimate is
    exact with ``omega = 0``); any integer above the bracketed value keeps the
    guarantee valid.
    """
    return _compute_s(k, a, _key(omega), _key(rho), _key(alpha))


@functools.lru_cache(maxsize=1 << 16)
def _compute_s(k, a, omega, rho, alpha):
    omega, _, _, m = _check(k, a, _unkey(omega), _unkey(rho), _unkey(alpha))
    base = k - a + omega * k
    if m >= a:
        s = math.ceil(base + (1 - omega) * m)
    else:
        s = _ceil_plus_sqrt(base, 1 - omega, m * a)
    return max(s, 1)


def compute_d(k, omega, rho, alpha):
    """``d = k`` when ``omega = 1``, else ``max(k, (1 + rho - 2 alpha rho) k)``."""
    omega, _, _, m = _check(k, 1, omega, rho, alpha)
    return k if omega == 1 else max(k, m)


def _C(s, a, b):
    if np.ndim(b):
        b = np.asarray(b, dtype=float)
        return np.maximum(s / np.sqrt(a * b), math.sqrt(s / a))
    return max(s / math.sqrt(a * b), math.sqrt(s / a))


def _check_b(b):
    if np.any(np.asarray(b) < 1):
        raise BoundsError("b must be a positive integer")


def compute_C_weighted(k, a, b, omega, rho, alpha):
    """``max(s / sqrt(ab), sqrt(s / a))``; ``b`` may be an array of orders."""
    _check_b(b)
    return _C(compute_s(k, a, omega, rho, alpha), a, b)


def compute_C_standard(k, a, b):
    """``max((2k-a) / sqrt(ab), sqrt((2k-a) / a))``; ``b`` may be an array of orders."""
    if k < 1 or not 1 <= a <= k:
        raise BoundsError(f"need 1 <= a <= k and b >= 1, got k={k}, a={a}, b={b}")
    _check_b(b)
    return _C(2 * k - a, a, b)


@dataclass(frozen=True)
class GuaranteeInputs:
    k: int
    a: int
    b: int
    omega: float
    rho: Fraction
    alpha: Fraction
    delta_a: float
    theta_ab: float

    def __post_init__(self):
        _check(self.k, self.a, self.omega, self.rho, self.alpha)
        if self.b < 1:
            raise BoundsError("b must be a positive integer")
        if not (self.delta_a >= 0 and self.theta_ab >= 0):
            raise BoundsError("delta_a and theta_ab must be nonnegative")
        object.__setattr__(self, "rho", as_fraction(self.rho, "rho"))
        object.__setattr__(self, "alpha", as_fraction(self.alpha, "alpha"))


@dataclass(frozen=True)
class ErrorConstants:
    """Bound constants for one condition: l2 pair ``(c0, c1)``, Dantzig pair ``(c0_ds, c1_ds)``."""

    c0: float
    c1: float
    c0_ds: float
    c1_ds: float


def _error_constants(delta, theta, C, s, d, a):
    gap = 1.0 - delta - C * theta
    if not gap > 0:
        return None
    c0 = math.sqrt(2 * (1 + delta) * d / a) / gap
    c1 = math.sqrt(2 * d) * C * theta / (gap * s) + 1 / math.sqrt(d)
    return ErrorConstants(c0, c1, math.sqrt(2 * d) / gap, c1)


@dataclass(frozen=True)
class GuaranteeReport:
    """Everything derived from one :class:`GuaranteeInputs`.

    ``D*`` are the weighted constants (present iff ``condition_met``) and
    ``C0``..``C1_ds`` the standard-l1 ones (present iff ``standard_met``).
    """

    inputs: GuaranteeInputs
    s: int
    d: int
    C_weighted: float
    C_standard: float
    condition_value: float
    condition_met: bool
    standard_value: float
    standard_met: bool
    D0: float = None
    D1: float = None
    D0_ds: float = None
    D1_ds: float = None
    C0: float = None
    C1: float = None
    C0_ds: float = None
    C1_ds: float = None
    prop1_case: str = None

    def to_dict(self):
        inp = self.inputs
        out = {
            "k": inp.k, "a": inp.a, "b": inp.b, "omega": inp.omega,
            "rho": str(inp.rho), "alpha": str(inp.alpha),
            "delta_a": inp.delta_a, "theta_ab": inp.theta_ab,
        }
        for name in ("s", "d", "C_weighted", "C_standard", "condition_value",
                     "condition_met", "standard_value", "standard_met", "D0", "D1",
                     "D0_ds", "D1_ds", "C0", "C1", "C0_ds", "C1_ds", "prop1_case"):
            out[name] = getattr(self, name)
        return out


def evaluate_guarantee(inputs):
    """Evaluate the weighted condition and all bound constants."""
    i = inputs
    s = compute_s(i.k, i.a, i.omega, i.rho, i.alpha)
    d = compute_d(i.k, i.omega, i.rho, i.alpha)
    Cw = _C(s, i.a, i.b)
    Cs = _C(2 * i.k - i.a, i.a, i.b)
    weighted = _error_constants(i.delta_a, i.theta_ab, Cw, s, d, i.a)
    standard = _error_constants(i.delta_a, i.theta_ab, Cs, 2 * i.k - i.a, i.k, i.a)
    fields = {}
    if weighted is not None:
        fields.update(D0=weighted.c0, D1=weighted.c1, D0_ds=weighted.c0_ds, D1_ds=weighted.c1_ds)
    if standard is not None:
        fields.update(C0=standard.c0, C1=standard.c1, C0_ds=standard.c0_ds, C1_ds=standard.c1_ds)
    report = GuaranteeReport(
        inputs=i, s=s, d=d, C_weighted=Cw, C_standard=Cs,
        condition_value=i.delta_a + Cw * i.theta_ab, condition_met=weighted is not None,
        standard_value=i.delta_a + Cs * i.theta_ab, standard_met=standard is not None,
        **fields)
    return replace(report, prop1_case=_classify(i, s).value)


def weighted_tail(x, T0, estimate, omega):
    """``omega ||x_{T0^c}||_1 + (1 - omega) ||x_{T~^c & T0^c}||_1``."""
    N = len(x)
    T0 = set(as_index_set(T0, N, "T0"))
    off = [i for i in range(N) if i not in T0]
    est = set(estimate)
    off_both = [i for i in off if i not in est]
    return (omega * float(sum(abs(x[i]) for i in off))
            + (1 - omega) * float(sum(abs(x[i]) for i in off_both)))


def error_bound_rhs(report, eps, x, T0, estimate, omega, noise_kind=NoiseKind.L2, eta=None):
    """Right-hand side of the recovery error bound.

    ``D0 (eps + eta) + D1 * 2 * tail`` for the l2-ball program and the same
    with the Dantzig constants for the Dantzig selector. ``eta`` is the
    solver radius and defaults to ``eps``, which gives the ``2 eps`` form.
    """
    if not report.condition_met:
        raise NoGuaranteeError("no guarantee applies: the sufficient condition is not met")
    kind = NoiseKind(noise_kind)
    eta = eps if eta is None else eta
    if eps < 0 or eta < eps:
        raise BoundsError("need 0 <= eps <= eta")
    tail = weighted_tail(list(map(float, x)), T0, estimate, float(omega))
    if kind in (NoiseKind.L2, NoiseKind.EXACT):
        c0, c1 = report.D0, report.D1
    elif kind is NoiseKind.DANTZIG:
        c0, c1 = report.D0_ds, report.D1_ds
    else:
        raise BoundsError("pick the l2 or dantzig kind; Gaussian noise uses the matching radius")
    return c0 * (eps + eta) + c1 * 2 * tail


class Prop1Case(str, Enum):
    OMEGA_ONE = "1"
    HALF_ACCURATE = "2"
    SMALL_B = "4"
    MIDDLE_B = "5"
    LARGE_B = "6"
    OUTSIDE = "outside"


def _classify(i, s):
    if Fraction(i.omega) == 1:
        return Prop1Case.OMEGA_ONE
    if i.alpha == Fraction(1, 2):
        return Prop1Case.HALF_ACCURATE
    if i.alpha < Fraction(1, 2):
        return Prop1Case.OUTSIDE
    if i.b <= s:
        return Prop1Case.SMALL_B
    if i.b <= 2 * i.k - i.a:
        return Prop1Case.MIDDLE_B
    return Prop1Case.LARGE_B


def _cmp(x, y, margin=STRICT_MARGIN):
    """Return ``"<"``, ``"="`` or ``">"`` comparing ``x`` with ``y`` up to ``margin``."""
    if x is None or y is None:
        return None
    if x < y - margin:
        return "<"
    if x > y + margin:
        return ">"
    return "="


@dataclass(frozen=True)
class Prop1Report:
    """Weighted-vs-standard comparison for one parameter set.

    ``relations`` maps each compared pair to ``"<"``, ``"="``, ``">"`` or
    ``None`` when a constant is undefined. For the middle and large ``b``
    cases ``d1_criterion`` holds the value of the closed-form test that
    decides ``D1 < C1``.
    """

    case: Prop1Case
    s: int
    two_k_minus_a: int
    relations: dict = field(default_factory=dict)
    d1_criterion: bool = None


def proposition1_compare(inputs):
    """Classify the inputs into comparison cases 1-6 and compare constants."""
    rep = evaluate_guarantee(inputs)
    i = inputs
    case = Prop1Case(rep.prop1_case)
    rel = {
        "s": _cmp(rep.s, 2 * i.k - i.a, 0),
        "d": _cmp(rep.d, i.k, 0),
        "C": _cmp(rep.C_weighted, rep.C_standard),
        "D0": _cmp(rep.D0, rep.C0),
        "D1": _cmp(rep.D1, rep.C1),
        "D0_ds": _cmp(rep.D0_ds, rep.C0_ds),
        "D1_ds": _cmp(rep.D1_ds, rep.C1_ds),
    }
    crit = None
    gap = 1 - i.delta_a - rep.C_weighted * i.theta_ab
    if case is Prop1Case.MIDDLE_B:
        s, b, a, k = rep.s, i.b, i.a, i.k
        coef = (2 * k - a - math.sqrt(b * s)) / (math.sqrt(a) * (math.sqrt(b) - math.sqrt(s)))
        crit = gap < coef * i.theta_ab
    elif case is Prop1Case.LARGE_B:
        crit = gap < math.sqrt((2 * i.k - i.a) / i.a) * i.theta_ab
    return Prop1Report(case, rep.s, 2 * i.k - i.a, rel, crit)
