"""Weighted l1 minimization under exact, l2-ball and Dantzig constraints.

All three programs minimize ``sum_i w_i |x_i|`` with ``w in [0, 1]^N``:

* ``solve_weighted_bp``   -- ``A x = y``
* ``solve_weighted_bpdn`` -- ``||A x - y||_2 <= eta``
* ``solve_weighted_ds``   -- ``||A^T (y - A x)||_inf <= eta``

The exact program is solved by ADMM (Douglas-Rachford) splitting between
the weighted soft-threshold and the projection onto ``{A x = y}``. The two
ball-constrained programs use the primal-dual hybrid gradient method with
adaptive step balancing; both constraint sets are balls around a fixed
centre, so the dual proximal step is a closed-form projection.

Each method finishes by polishing: the detected support (and, for the
Dantzig selector, the detected active constraints) is re-solved exactly
and the polished point is kept only when it is feasible and no worse. For
the Dantzig selector the polished point is additionally certified by a
zero duality gap.

``oracle_weighted_min`` is an independent brute-force reference for tiny
instances.
"""

import itertools
import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from scipy.optimize import linprog

from .linalg import as_matrix, as_vector, max_singular_value
from .model import as_index_set
from .rip import EnumerationBudgetError, LemmaWitness


class Status(str, Enum):
    OPTIMAL = "Optimal"
    MAX_ITERATIONS = "MaxIterations"
    INFEASIBLE = "Infeasible"


class ConstraintKind(str, Enum):
    EXACT = "exact"
    L2 = "l2"
    DANTZIG = "dantzig"


@dataclass(frozen=True)
class SolveConfig:
    max_iterations: int = 20000
    primal_tolerance: float = 1e-8
    dual_tolerance: float = 1e-8
    feasibility_tolerance: float = 1e-7
    #: initial ``(tau, sigma)`` scale factors relative to ``1/||K||``
    step_parameters: tuple = (1.0, 1.0)
    polish: bool = True

    def __post_init__(self):
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be positive")
        if min(self.primal_tolerance, self.dual_tolerance, self.feasibility_tolerance) <= 0:
            raise ValueError("tolerances must be positive")
        if len(self.step_parameters) != 2 or min(self.step_parameters) <= 0:
            raise ValueError("step_parameters must be two positive numbers")


@dataclass
class SolverResult:
    x_hat: np.ndarray
    status: Status
    objective: float
    constraint_residual: float
    iterations: int
    kind: ConstraintKind = ConstraintKind.EXACT
    history: dict = field(default_factory=dict, repr=False)

    @property
    def optimal(self):
        return self.status is Status.OPTIMAL


def _weights(w, N):
    w = as_vector(w, "w")
    if w.size != N:
        raise ValueError(f"weights have length {w.size}, expected {N}")
    if np.any(w < 0) or np.any(w > 1):
        raise ValueError("weights must lie in [0, 1]")
    return w


def _setup(A, y, w):
    A = as_matrix(A)
    y = as_vector(y, "y")
    if A.shape[0] != y.size:
        raise ValueError(f"A has {A.shape[0]} rows but y has length {y.size}")
    return A, y, _weights(w, A.shape[1])


def soft_threshold(v, t):
    """Componentwise ``sign(v) * max(|v| - t, 0)``; ``t`` may be a vector."""
    return np.sign(v) * np.maximum(np.abs(v) - t, 0.0)


def residual(A, y, x, kind):
    """Constraint residual matching ``kind``: ``||Ax - y||_2`` or ``||A^T(y - Ax)||_inf``."""
    r = y - A @ x
    if ConstraintKind(kind) is ConstraintKind.DANTZIG:
        return float(np.max(np.abs(A.T @ r)))
    return float(np.linalg.norm(r))


def _objective(x, w):
    return float(np.sum(w * np.abs(x)))


class _RangeProjector:
    """Projection onto ``{x : A x = y}`` (least-squares consistent) via a thin SVD."""

    def __init__(self, A, y):
        U, sv, Vt = np.linalg.svd(A, full_matrices=False)
        rank = int(np.sum(sv > sv[0] * max(A.shape) * np.finfo(float).eps)) if sv.size else 0
        self.U, self.sv, self.Vt = U[:, :rank], sv[:rank], Vt[:rank]
        self.A, self.y = A, y
        # minimum-norm least-squares point; feasible iff y lies in range(A)
        self.x0 = self.Vt.T @ ((self.U.T @ y) / self.sv)

    def __call__(self, v):
        return v - self.Vt.T @ (self.Vt @ v) + self.Vt.T @ (self.Vt @ self.x0)


def _support_lstsq(A, y, x, scale):
    S = np.flatnonzero(np.abs(x) > 1e-9 * scale)
    if S.size == 0 or S.size > A.shape[0]:
        return None
    As = A[:, S]
    sol, *_ = np.linalg.lstsq(As, y, rcond=None)
    cand = np.zeros_like(x)
    cand[S] = sol
    return cand


def _finish(A, y, w, x, kind, eta, config, iterations, converged, history):
    res = residual(A, y, x, kind)
    feasible = res <= eta + config.feasibility_tolerance * (1 + np.linalg.norm(y))
    status = Status.OPTIMAL if converged and feasible else Status.MAX_ITERATIONS
    return SolverResult(x, status, _objective(x, w), res, iterations, kind, history)


def solve_weighted_bp(A, y, w, config=None):
    """Minimize ``||x||_{1,w}`` subject to ``A x = y``."""
    config = config or SolveConfig()
    A, y, w = _setup(A, y, w)
    N = A.shape[1]
    proj = _RangeProjector(A, y)
    ynorm = float(np.linalg.norm(y))
    if np.linalg.norm(A @ proj.x0 - y) > config.feasibility_tolerance * (1 + ynorm):
        x0 = proj.x0
        return SolverResult(x0, Status.INFEASIBLE, _objective(x0, w),
                            residual(A, y, x0, "exact"), 0, ConstraintKind.EXACT)

    # penalty scaled so thresholds w/rho are comparable to the signal magnitude
    rho = 1.0 / max(np.max(np.abs(proj.x0)), 1e-12)
    z = np.zeros(N)
    u = np.zeros(N)
    x = proj(z)
    converged = False
    it = 0
    for it in range(1, config.max_iterations + 1):
        x = proj(z - u)
        z_old = z
        z = soft_threshold(x + u, w / rho)
        u += x - z
        r_pri = np.linalg.norm(x - z)
        r_dual = rho * np.linalg.norm(z - z_old)
        eps_pri = config.primal_tolerance * (math.sqrt(N) + max(np.linalg.norm(x), np.linalg.norm(z)))
        eps_dual = config.dual_tolerance * (math.sqrt(N) + rho * np.linalg.norm(u))
        if r_pri <= eps_pri and r_dual <= eps_dual:
            converged = True
            break
        if config.polish and it % _CERTIFY_EVERY == 0:
            exact = _bp_crossover(A, y, w, z, config.feasibility_tolerance * (1 + ynorm))
            if exact is not None:
                return _finish(A, y, w, exact, ConstraintKind.EXACT, 0.0, config, it, True, {})
    # x is feasible by construction; z carries the sparsity pattern
    x_out = x
    if config.polish:
        scale = max(1.0, float(np.max(np.abs(z))))
        cand = _support_lstsq(A, y, z, scale)
        tol = config.feasibility_tolerance * (1 + ynorm)
        if (cand is not None and residual(A, y, cand, "exact") <= tol
                and _objective(cand, w) <= _objective(x, w) + 1e-12 * scale):
            x_out = cand
    return _finish(A, y, w, x_out, ConstraintKind.EXACT, 0.0, config, it, converged, {})


def _bp_crossover(A, y, w, z, tol):
    """Least-squares point on the support of ``z``, certified by a dual point.

    The dual is ``max p^T y`` subject to ``|A^T p| <= w``; ``p`` is the
    minimum-norm solution of ``A_S^T p = w_S sign(z_S)``.
    """
    zs = max(float(np.max(np.abs(z))), 1e-300)
    for rel in (1e-3, 1e-5, 1e-7):
        S = np.flatnonzero(np.abs(z) > rel * zs)
        if S.size == 0 or S.size > A.shape[0]:
            continue
        sol, *_ = np.linalg.lstsq(A[:, S], y, rcond=None)
        cand = np.zeros_like(z)
        cand[S] = sol
        if residual(A, y, cand, "exact") > tol:
            continue
        if np.any(np.sign(cand[S]) != np.sign(z[S])):
            continue
        p, *_ = np.linalg.lstsq(A[:, S].T, w[S] * np.sign(z[S]), rcond=None)
        if np.any(np.abs(A.T @ p) > w + 1e-9):
            continue
        primal_val = _objective(cand, w)
        if primal_val - float(p @ y) <= 1e-9 * (1 + abs(primal_val)):
            return cand
    return None


def _project_l2_ball(v, center, radius):
    d = v - center
    nrm = np.linalg.norm(d)
    return v if nrm <= radius else center + d * (radius / nrm)


def _project_inf_ball(v, center, radius):
    return np.clip(v, center - radius, center + radius)


def _pdhg(K, Kt, knorm, center, radius, project, w, config, certify=None):
    """Adaptive PDHG for ``min ||x||_{1,w}`` s.t. ``K x`` in a ball around ``center``.

    ``certify(x, p)``, when given, is tried every few iterations and may
    return an exactly optimal point, which ends the run.
    """
    N = w.size
    x = np.zeros(N)
    p = np.zeros(center.size)
    tau = config.step_parameters[0] * 0.95 / knorm
    sigma = config.step_parameters[1] * 0.95 / knorm
    adapt, decay, ratio = 0.5, 0.95, 1.5
    Kx = K(x)
    converged = False
    it = 0
    cscale = 1.0 + np.linalg.norm(center)
    for it in range(1, config.max_iterations + 1):
        x_new = soft_threshold(x - tau * Kt(p), tau * w)
        Kx_new = K(x_new)
        v = p + sigma * (2 * Kx_new - Kx)
        p_new = v - sigma * project(v / sigma, center, radius)
        dx, dp = x - x_new, p - p_new
        r_pri = np.linalg.norm(dx / tau - Kt(dp))
        r_dual = np.linalg.norm(dp / sigma - (Kx - Kx_new))
        x, p, Kx = x_new, p_new, Kx_new
        xscale = 1.0 + np.linalg.norm(x)
        if r_pri <= config.primal_tolerance * cscale and r_dual <= config.dual_tolerance * xscale:
            converged = True
            break
        if certify is not None and it % _CERTIFY_EVERY == 0:
            exact = certify(x, p)
            if exact is not None:
                return exact, it, True
        if r_pri > ratio * r_dual * (cscale / xscale) and adapt > 1e-6:
            tau /= 1 - adapt
            sigma *= 1 - adapt
            adapt *= decay
        elif r_dual * (cscale / xscale) > ratio * r_pri and adapt > 1e-6:
            tau *= 1 - adapt
            sigma /= 1 - adapt
            adapt *= decay
    if certify is not None and not converged:
        exact = certify(x, p)
        if exact is not None:
            return exact, it, True
    return x, it, converged


_CERTIFY_EVERY = 50


def solve_weighted_bpdn(A, y, w, eta, config=None):
    """Minimize ``||x||_{1,w}`` subject to ``||A x - y||_2 <= eta``."""
    config = config or SolveConfig()
    A, y, w = _setup(A, y, w)
    if eta < 0:
        raise ValueError("eta must be nonnegative")
    if eta == 0:
        res = solve_weighted_bp(A, y, w, config)
        res.kind = ConstraintKind.L2
        return res
    ynorm = float(np.linalg.norm(y))
    if ynorm <= eta:
        x0 = np.zeros(A.shape[1])
        return SolverResult(x0, Status.OPTIMAL, 0.0, ynorm, 0, ConstraintKind.L2)
    proj = _RangeProjector(A, y)
    gap = float(np.linalg.norm(A @ proj.x0 - y))
    tol = config.feasibility_tolerance * (1 + ynorm)
    if gap > eta + tol:
        return SolverResult(proj.x0, Status.INFEASIBLE, _objective(proj.x0, w), gap, 0,
                            ConstraintKind.L2)
    knorm = max_singular_value(A)
    certify = (lambda x, p: _l2_crossover(A, y, w, eta, x, tol)) if config.polish else None
    x, it, conv = _pdhg(lambda v: A @ v, lambda q: A.T @ q, knorm, y, eta,
                        _project_l2_ball, w, config, certify)
    x = _polish_l2(A, y, w, x, eta, config)
    return _finish(A, y, w, x, ConstraintKind.L2, eta, config, it, conv, {})


def _ellipsoid_min(A, y, w, x, eta, S):
    """Minimizer of ``c^T x_S`` over ``||A_S x_S - y||_2 <= eta`` with ``c = w_S sign(x_S)``."""
    As = A[:, S]
    M = As.T @ As
    if np.linalg.cond(M) > 1e12:
        return None
    x_ls = np.linalg.solve(M, As.T @ y)
    r0 = float(np.linalg.norm(As @ x_ls - y))
    if r0 > eta:
        return None
    c = w[S] * np.sign(x[S])
    cand = np.zeros_like(x)
    if np.all(c == 0):
        cand[S] = x_ls
    else:
        Minv_c = np.linalg.solve(M, c)
        cand[S] = x_ls - math.sqrt(max(eta**2 - r0**2, 0.0)) * Minv_c / math.sqrt(c @ Minv_c)
    return cand


def _polish_l2(A, y, w, x, eta, config):
    """Exact minimizer of the linear objective on the detected support and sign pattern.

    On a fixed support ``S`` with signs ``sgn`` the objective is ``c^T x_S`` with
    ``c = w_S * sgn`` and the feasible set is an ellipsoid, whose minimizer is
    closed form.
    """
    if not config.polish:
        return x
    scale = max(1.0, float(np.max(np.abs(x))))
    S = np.flatnonzero(np.abs(x) > 1e-9 * scale)
    if S.size == 0 or S.size > A.shape[0]:
        return x
    cand = _ellipsoid_min(A, y, w, x, eta, S)
    tol = config.feasibility_tolerance * (1 + np.linalg.norm(y))
    if (cand is None or residual(A, y, cand, "l2") > eta + tol
            or _objective(cand, w) > _objective(x, w) + 1e-12 * scale):
        return x
    return cand


def _l2_crossover(A, y, w, eta, x, tol):
    """Polish ``x`` on its detected support and certify it with a dual point.

    The dual is ``max p^T y - eta ||p||_2`` subject to ``|A^T p| <= w``. At
    the polished point the multiplier is ``p = mu (y - A x)`` with ``mu``
    fitted from ``A_S^T p = w_S sign(x_S)``; the point is returned only when
    ``p`` is dual feasible and closes the gap.
    """
    xs = max(float(np.max(np.abs(x))), 1e-300)
    for rel in (1e-3, 1e-5, 1e-7):
        S = np.flatnonzero(np.abs(x) > rel * xs)
        if S.size == 0 or S.size > A.shape[0]:
            continue
        cand = _ellipsoid_min(A, y, w, x, eta, S)
        if cand is None or residual(A, y, cand, "l2") > eta + tol:
            continue
        c = w[S] * np.sign(x[S])
        r = y - A @ cand
        g = A[:, S].T @ r
        mu = max(float(c @ g) / float(g @ g), 0.0) if g @ g > 0 else 0.0
        p = mu * r
        if np.any(np.abs(A.T @ p) > w + 1e-9):
            continue
        primal_val = _objective(cand, w)
        dual_val = float(p @ y - eta * np.linalg.norm(p))
        if primal_val - dual_val <= 1e-9 * (1 + abs(primal_val)):
            return cand
    return None


def solve_weighted_ds(A, y, w, eta, config=None):
    """Minimize ``||x||_{1,w}`` subject to ``||A^T (y - A x)||_inf <= eta``."""
    config = config or SolveConfig()
    A, y, w = _setup(A, y, w)
    if eta < 0:
        raise ValueError("eta must be nonnegative")
    Aty = A.T @ y
    if np.max(np.abs(Aty)) <= eta:
        x0 = np.zeros(A.shape[1])
        return SolverResult(x0, Status.OPTIMAL, 0.0, float(np.max(np.abs(Aty))), 0,
                            ConstraintKind.DANTZIG)
    G = A.T @ A
    knorm = max_singular_value(A) ** 2
    tol = config.feasibility_tolerance * (1 + np.linalg.norm(y))
    certify = (lambda x, p: _ds_crossover(G, Aty, w, eta, x, -p, tol)) if config.polish else None
    x, it, conv = _pdhg(lambda v: G @ v, lambda q: G @ q, knorm, Aty, eta,
                        _project_inf_ball, w, config, certify)
    return _finish(A, y, w, x, ConstraintKind.DANTZIG, eta, config, it, conv, {})


def _ds_crossover(G, b, w, eta, x, mu, tol):
    """Snap an approximate Dantzig-selector primal-dual pair onto an exact vertex.

    The dual of the program is ``max mu^T b - eta ||mu||_1`` subject to
    ``|G mu| <= w``. With ``S`` the detected primal support and ``J`` the
    detected active constraints, complementarity gives two small linear
    systems: ``G[J, S] x_S = b_J - eta sign(mu_J)`` and
    ``G[S, J] mu_J = w_S sign(x_S)``. The pair is returned only if it is
    primal feasible, dual feasible and closes the duality gap.
    """
    xs = max(float(np.max(np.abs(x))), 1e-300)
    ms = max(float(np.max(np.abs(mu))), 1e-300)
    for rel in (1e-3, 1e-5, 1e-7):
        S = np.flatnonzero(np.abs(x) > rel * xs)
        J = np.flatnonzero(np.abs(mu) > rel * ms)
        if S.size == 0 or J.size == 0:
            continue
        sx = np.sign(x[S])
        sm = np.sign(mu[J])
        xS, *_ = np.linalg.lstsq(G[np.ix_(J, S)], b[J] - eta * sm, rcond=None)
        muJ, *_ = np.linalg.lstsq(G[np.ix_(S, J)], w[S] * sx, rcond=None)
        cand = np.zeros_like(x)
        cand[S] = xS
        dual = np.zeros_like(mu)
        dual[J] = muJ
        if np.max(np.abs(b - G @ cand)) > eta + tol:
            continue
        if np.any(np.abs(G @ dual) > w + 1e-9):
            continue
        primal_val = _objective(cand, w)
        dual_val = float(dual @ b - eta * np.abs(dual).sum())
        if primal_val - dual_val <= 1e-9 * (1 + abs(primal_val)):
            return cand
    return None


def solve(A, y, w, kind=ConstraintKind.EXACT, eta=0.0, config=None):
    """Dispatch on ``kind``."""
    kind = ConstraintKind(kind)
    if kind is ConstraintKind.EXACT:
        return solve_weighted_bp(A, y, w, config)
    if kind is ConstraintKind.L2:
        return solve_weighted_bpdn(A, y, w, eta, config)
    return solve_weighted_ds(A, y, w, eta, config)


#: Size limits for :func:`oracle_weighted_min`.
ORACLE_MAX_N = 14
ORACLE_MAX_ROWS = 8


def _oracle_exact(A, y, w, tol):
    n, N = A.shape
    best, best_x = 0.0, np.zeros(N)
    if np.linalg.norm(y) <= tol:
        return best_x
    best = math.inf
    for r in range(1, min(n, N) + 1):
        for S in itertools.combinations(range(N), r):
            As = A[:, S]
            sv = np.linalg.svd(As, compute_uv=False)
            if sv[-1] <= 1e-10 * max(1.0, sv[0]):
                continue
            sol, *_ = np.linalg.lstsq(As, y, rcond=None)
            if np.linalg.norm(As @ sol - y) > tol:
                continue
            val = float(np.sum(w[list(S)] * np.abs(sol)))
            if val < best:
                best = val
                best_x = np.zeros(N)
                best_x[list(S)] = sol
    return None if best == math.inf else best_x


def _oracle_l2(A, y, w, eta):
    n, N = A.shape
    best_x = np.zeros(N)
    if np.linalg.norm(y) <= eta:
        return best_x
    best = math.inf
    best_x = None
    for r in range(1, min(n, N) + 1):
        signs = np.array(list(itertools.product((-1.0, 1.0), repeat=r)))
        for S in itertools.combinations(range(N), r):
            As = A[:, S]
            M = As.T @ As
            ev = np.linalg.eigvalsh(M)
            if ev[0] <= 1e-12 * max(1.0, ev[-1]):
                continue
            x_ls = np.linalg.solve(M, As.T @ y)
            r0sq = float(np.sum((As @ x_ls - y) ** 2))
            if r0sq > eta**2:
                continue
            rad = math.sqrt(eta**2 - r0sq)
            C = signs * w[list(S)]
            MinvC = np.linalg.solve(M, C.T).T
            q = np.einsum("ij,ij->i", C, MinvC)
            step = np.where(q > 0, rad / np.sqrt(np.where(q > 0, q, 1.0)), 0.0)
            cands = x_ls - step[:, None] * MinvC
            vals = np.abs(cands) @ w[list(S)]
            j = int(np.argmin(vals))
            if vals[j] < best:
                best = float(vals[j])
                best_x = np.zeros(N)
                best_x[list(S)] = cands[j]
    return best_x


def _oracle_ds(A, y, w, eta):
    N = A.shape[1]
    G = A.T @ A
    Aty = A.T @ y
    # x = p - q with p, q >= 0;  -eta <= A^T y - G x <= eta
    c = np.concatenate([w, w])
    Gb = np.hstack([G, -G])
    A_ub = np.vstack([Gb, -Gb])
    b_ub = np.concatenate([Aty + eta, eta - Aty])
    res = linprog(c, A_ub=A_ub, b_ub=b_ub, bounds=(0, None), method="highs",
                  options={"primal_feasibility_tolerance": 1e-10,
                           "dual_feasibility_tolerance": 1e-10})
    if res.status != 0:
        return None
    return res.x[:N] - res.x[N:]


def oracle_weighted_min(A, y, w, constraint_kind=ConstraintKind.EXACT, eta=0.0, tol=1e-9):
    """Brute-force reference minimizer for tiny instances.

    * exact: enumerate every support of size at most ``n`` with linearly
      independent columns and keep the feasible least-squares point of least
      weighted norm (some optimal vertex has at most ``n`` nonzeros);
    * l2 ball: enumerate supports and sign patterns; on each, the weighted
      norm is linear and the constraint an ellipsoid, so the minimizer is
      closed form; the best candidate over all faces is the optimum;
    * Dantzig: solve the equivalent linear program with HiGHS.

    Returns a :class:`SolverResult` whose ``iterations`` field is 0.
    """
    A, y, w = _setup(A, y, w)
    n, N = A.shape
    kind = ConstraintKind(constraint_kind)
    if N > ORACLE_MAX_N or n > ORACLE_MAX_ROWS:
        raise EnumerationBudgetError(
            f"oracle limited to N <= {ORACLE_MAX_N}, n <= {ORACLE_MAX_ROWS}; got {n}x{N}")
    if kind is ConstraintKind.EXACT or (kind is ConstraintKind.L2 and eta == 0):
        x = _oracle_exact(A, y, w, tol * (1 + np.linalg.norm(y)))
    elif kind is ConstraintKind.L2:
        x = _oracle_l2(A, y, w, eta)
    else:
        x = _oracle_ds(A, y, w, eta)
    if x is None:
        return SolverResult(np.zeros(N), Status.INFEASIBLE, math.inf, math.inf, 0, kind)
    return SolverResult(x, Status.OPTIMAL, _objective(x, w), residual(A, y, x, kind), 0, kind)


def cone_check(h, x, T0, estimate, omega, tol=None):
    """Check the weighted cone inequality satisfied by every minimizer.

    With ``h = x_hat - x``::

        ||h_{T0^c}||_1 <= omega ||h_{T0}||_1 + (1 - omega) ||h_{T0 u T~ minus T~_alpha}||_1
                          + 2 (omega ||x_{T0^c}||_1 + (1 - omega) ||x_{T~^c & T0^c}||_1)
    """
    h = as_vector(h, "h")
    x = as_vector(x, "x")
    N = x.size
    T0 = set(as_index_set(T0, N, "T0"))
    est = set(estimate)
    allidx = set(range(N))
    off = sorted(allidx - T0)
    sym = sorted((T0 | est) - (T0 & est))
    off_both = sorted(allidx - T0 - est)
    l1 = lambda v, idx: float(np.abs(v[idx]).sum()) if idx else 0.0
    tail = omega * l1(x, off) + (1 - omega) * l1(x, off_both)
    lhs = l1(h, off)
    rhs = omega * l1(h, sorted(T0)) + (1 - omega) * l1(h, sym) + 2 * tail
    if tol is None:
        tol = 1e-7 * (1 + float(np.abs(x).sum()) + float(np.abs(h).sum()))
    return LemmaWitness(lhs <= rhs + tol, lhs, rhs, {"tail": tail, "tol": tol})
