"""Counterexample showing the weighted condition cannot be relaxed.

For parameters with ``1 <= a <= s <= k`` we build a square matrix
``A = c (I - xi xi^T)`` with ``c = sqrt(1 + (L-s)/(L+s))`` and ``L = a + s``,
together with two ``k``-sparse vectors ``eta_vec`` and ``gamma_vec`` such that
``A eta_vec = A gamma_vec`` while ``||gamma_vec||_{1,w} <= ||eta_vec||_{1,w}``.
The matrix attains ``delta_a + C theta_{a,b} = 1`` and weighted l1
minimization cannot recover ``eta_vec``.

Index layout (0-based), with ``g = alpha rho k`` and ``t = rho k``::

    [0, k-g)          ones of eta_vec
    [k-g, k-g+t)      the support estimate block (weight omega)
    [k-g+t, k+t)      the remaining g ones of eta_vec
    [k+t, L)          extra -1 entries of gamma_vec (only when L - k > t)

The estimate block never meets the support of ``eta_vec``; the ``alpha``
passed in only enters through ``s``.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .bounds import _C, BoundsError, compute_s
from .linalg import as_matrix
from .model import SupportEstimate, as_fraction, make_weights, weighted_norm
from .rip import (DEFAULT_BUDGET, EnumerationBudgetError, compute_delta, compute_theta,
                  randomized_lower_bound_delta, randomized_lower_bound_theta)
from .solvers import SolveConfig, solve_weighted_bp, solve_weighted_bpdn


@dataclass(frozen=True)
class CounterexampleInstance:
    A: np.ndarray
    xi1: np.ndarray
    eta_vec: np.ndarray
    gamma_vec: np.ndarray
    estimate: SupportEstimate
    params: dict = field(default_factory=dict)

    @property
    def weights(self):
        return make_weights(self.estimate, self.params["omega"]).w

    @property
    def T0(self):
        return tuple(int(i) for i in np.flatnonzero(self.eta_vec))


def build_counterexample(N, k, a, b, rho, alpha, omega):
    """Construct the matrix, ``xi_1``, ``eta_vec`` and ``gamma_vec``.

    Raises
    ------
    BoundsError
        If ``1 <= a <= s <= k``, ``a + s <= N`` or the layout size
        ``k + rho k <= N`` fails, naming the failing inequality.
    """
    rho_f, alpha_f = as_fraction(rho, "rho"), as_fraction(alpha, "alpha")
    s = compute_s(k, a, omega, rho_f, alpha_f)
    if not 1 <= a <= s <= k:
        raise BoundsError(f"need 1 <= a <= s <= k, got a={a}, s={s}, k={k}")
    if a + s > N:
        raise BoundsError(f"need a + s <= N, got a + s = {a + s} > N = {N}")
    if b < 1:
        raise BoundsError("need b >= 1")
    t = int(rho_f * k)
    g = int(alpha_f * rho_f * k)
    if k + t > N:
        raise BoundsError(f"layout needs k + rho k <= N, got {k + t} > {N}")
    L = a + s
    lead = k - g

    eta_vec = np.zeros(N)
    eta_vec[:lead] = 1.0
    eta_vec[lead + t:k + t] = 1.0
    gamma_vec = np.zeros(N)
    pattern = np.zeros(N)
    if L - k > t:
        pattern[:L] = 1.0
        gamma_vec[lead:lead + t] = -1.0
        gamma_vec[k + t:L] = -1.0
        branch = "wide"
    else:
        pattern[:lead] = 1.0
        pattern[lead:lead + (L - k)] = 1.0
        pattern[lead + t:k + t] = 1.0
        gamma_vec[lead:lead + (L - k)] = -1.0
        branch = "narrow"
    xi1 = pattern / math.sqrt(L)
    c = math.sqrt(1 + (L - s) / (L + s))
    A = c * (np.eye(N) - np.outer(xi1, xi1))
    estimate = SupportEstimate(tuple(range(lead, lead + t)), N)
    params = dict(N=N, k=k, a=a, b=b, rho=rho_f, alpha=alpha_f, omega=float(omega),
                  s=s, L=L, branch=branch)
    return CounterexampleInstance(A, xi1, eta_vec, gamma_vec, estimate, params)


def analytic_bounds(inst):
    """Upper bounds on ``delta_a`` and ``theta_{a,b}`` implied by the construction."""
    p = inst.params
    L, s, a, b = p["L"], p["s"], p["a"], p["b"]
    c2 = 1 + (L - s) / (L + s)
    theta = c2 * math.sqrt(a * b) / L if b <= s else c2 * math.sqrt(a * s) / L
    return {"delta_a": (L - s) / (L + s), "theta_ab": theta}


@dataclass
class VerificationReport:
    exact: bool
    delta_a: float
    theta_ab: float
    C: float
    condition_value: float
    analytic: dict
    eta_weighted_norm: float
    gamma_weighted_norm: float
    solver_objective: float
    solver_status: str
    distance_to_eta: float
    eta_gamma_distance: float
    recovery_fails: bool
    noise_path: list = field(default_factory=list)

    def to_dict(self):
        return dict(self.__dict__)


def verify_counterexample(inst, budget=DEFAULT_BUDGET, config=None, epsilons=(1e-1, 1e-2, 1e-3, 1e-4),
                          seed=0, trials=20000):
    """Measure the constants of ``inst.A`` and run the solvers on ``y = A eta_vec``.

    ``delta_a`` and ``theta_{a,b}`` are enumerated exactly when the budget
    allows; otherwise randomized lower bounds are reported with ``exact``
    set to False. The noise path solves the l2-ball program for
    ``y = A eta_vec + z`` with ``||z||_2 = eps`` for each ``eps``.
    """
    p = inst.params
    A = as_matrix(inst.A)
    a, b, s = p["a"], p["b"], p["s"]
    try:
        delta = compute_delta(A, a, budget).value
        theta = compute_theta(A, a, b, budget).value
        exact = True
    except EnumerationBudgetError:
        delta = randomized_lower_bound_delta(A, a, trials, seed)
        theta = randomized_lower_bound_theta(A, a, b, trials, seed)
        exact = False
    C = _C(s, a, b)
    w = make_weights(inst.estimate, p["omega"]).w
    eta_norm = weighted_norm(inst.eta_vec, w)
    gamma_norm = weighted_norm(inst.gamma_vec, w)
    gap = float(np.linalg.norm(inst.eta_vec - inst.gamma_vec))

    res = solve_weighted_bp(A, A @ inst.eta_vec, w, config)
    dist = float(np.linalg.norm(res.x_hat - inst.eta_vec))
    fails = res.objective < eta_norm - 1e-8 or dist > 0.5 * gap

    rng = np.random.default_rng(seed)
    direction = rng.standard_normal(A.shape[0])
    direction /= np.linalg.norm(direction)
    path = []
    for eps in epsilons:
        r = solve_weighted_bpdn(A, A @ inst.eta_vec + eps * direction, w, eps, config or SolveConfig())
        path.append({"epsilon": eps, "distance": float(np.linalg.norm(r.x_hat - inst.eta_vec)),
                     "objective": r.objective, "status": r.status.value})
    return VerificationReport(
        exact=exact, delta_a=delta, theta_ab=theta, C=C, condition_value=delta + C * theta,
        analytic=analytic_bounds(inst), eta_weighted_norm=eta_norm,
        gamma_weighted_norm=gamma_norm, solver_objective=res.objective,
        solver_status=res.status.value, distance_to_eta=dist, eta_gamma_distance=gap,
        recovery_fails=fails, noise_path=path)
