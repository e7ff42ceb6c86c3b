"""Restricted isometry and restricted orthogonality constants.

The exact routines enumerate every support (pair) in lexicographic order
and keep the first maximiser, so witnesses are reproducible. Enumeration
is combinatorial; a budget guard makes oversized requests fail loudly
instead of running for hours. For bigger matrices the randomized routines
give certified *lower* bounds.
"""

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .linalg import as_matrix, as_vector
from .model import as_fraction

#: Default cap on the number of supports (or support pairs) enumerated.
DEFAULT_BUDGET = 10**7
#: Slack used by the lemma predicates.
LEMMA_TOL = 1e-9

_CHUNK = 4096


class EnumerationBudgetError(RuntimeError):
    """Exact enumeration would exceed the configured budget."""


@dataclass(frozen=True)
class RicValue:
    order: int
    value: float
    argmax_support: tuple


@dataclass(frozen=True)
class RocValue:
    orders: tuple
    value: float
    argmax_supports: tuple


def _extreme_eigs(G):
    """Batched (min, max) eigenvalues of symmetric ``G`` with shape (m, p, p)."""
    p = G.shape[-1]
    if p == 1:
        d = G[:, 0, 0]
        return d, d
    if p == 2:
        a, b, c = G[:, 0, 0], G[:, 0, 1], G[:, 1, 1]
        mid = 0.5 * (a + c)
        rad = np.hypot(0.5 * (a - c), b)
        return mid - rad, mid + rad
    ev = np.linalg.eigvalsh(G)
    return ev[:, 0], ev[:, -1]


def _spectral_norms(B):
    """Batched largest singular value of ``B`` with shape (m, p, q)."""
    if B.shape[1] > B.shape[2]:
        B = np.swapaxes(B, 1, 2)
    if B.shape[1] == 1:
        return np.sqrt(np.einsum("mij,mij->m", B, B))
    _, top = _extreme_eigs(B @ np.swapaxes(B, 1, 2))
    return np.sqrt(np.maximum(top, 0.0))


def _check_budget(count, budget, what):
    if count > budget:
        raise EnumerationBudgetError(
            f"{what} needs {count} enumerations, above the budget of {budget}; "
            "use randomized_lower_bound_delta/theta for a lower bound instead")


def _combo_array(n, r):
    if r == 0:
        return np.zeros((1, 0), dtype=np.intp)
    return np.array(list(itertools.combinations(range(n), r)), dtype=np.intp).reshape(-1, r)


def _delta_of(G, idx):
    lo, hi = _extreme_eigs(G[idx[:, :, None], idx[:, None, :]])
    return np.maximum(np.abs(lo - 1.0), np.abs(hi - 1.0))


def compute_delta(A, k, budget=DEFAULT_BUDGET):
    """Exact restricted isometry constant of order ``k``.

    ``delta_k`` is the largest deviation ``max(|lmin - 1|, |lmax - 1|)`` of
    the eigenvalues of ``A_S^T A_S`` over all ``k``-subsets ``S``.
    """
    A = as_matrix(A)
    N = A.shape[1]
    if not 1 <= k <= N:
        raise ValueError(f"order k={k} outside [1, {N}]")
    _check_budget(math.comb(N, k), budget, f"delta_{k}")
    G = A.T @ A
    best, arg = -1.0, None
    combos = itertools.combinations(range(N), k)
    while True:
        chunk = list(itertools.islice(combos, _CHUNK))
        if not chunk:
            break
        idx = np.array(chunk, dtype=np.intp)
        dev = _delta_of(G, idx)
        j = int(np.argmax(dev))
        if dev[j] > best:
            best, arg = float(dev[j]), tuple(chunk[j])
    return RicValue(k, best, arg)


def compute_theta(A, k1, k2, budget=DEFAULT_BUDGET):
    """Exact restricted orthogonality constant ``theta_{k1,k2}``.

    Maximum of ``sigma_max(A_S^T A_T)`` over disjoint ``S``, ``T`` with
    ``|S| = k1`` and ``|T| = k2``.
    """
    A = as_matrix(A)
    N = A.shape[1]
    if k1 < 1 or k2 < 1 or k1 + k2 > N:
        raise ValueError(f"orders ({k1}, {k2}) invalid for N={N}")
    _check_budget(math.comb(N, k1) * math.comb(N - k1, k2), budget, f"theta_{k1},{k2}")
    G = A.T @ A
    base = _combo_array(N - k1, k2)
    best, arg = -1.0, None
    everything = np.arange(N)
    for S in itertools.combinations(range(N), k1):
        comp = np.delete(everything, S)
        Ts = comp[base]
        rows = G[list(S)]
        B = np.swapaxes(rows[:, Ts], 0, 1)
        vals = _spectral_norms(B)
        j = int(np.argmax(vals))
        if vals[j] > best:
            best, arg = float(vals[j]), (tuple(S), tuple(int(t) for t in Ts[j]))
    return RocValue((k1, k2), best, arg)


def delta_of_support(A, S):
    """Isometry deviation of a single support (used to re-check witnesses)."""
    A = as_matrix(A)
    idx = np.array([sorted(S)], dtype=np.intp)
    return float(_delta_of(A.T @ A, idx)[0])


def theta_of_supports(A, S, T):
    A = as_matrix(A)
    B = (A[:, list(S)].T @ A[:, list(T)])[None]
    return float(_spectral_norms(B)[0])


def _random_subsets(rng, N, r, count):
    keys = rng.random((count, N))
    return np.sort(np.argpartition(keys, r - 1, axis=1)[:, :r], axis=1)


def randomized_lower_bound_delta(A, k, trials, seed=0):
    """Max isometry deviation over ``trials`` random ``k``-supports.

    Never exceeds :func:`compute_delta`; deterministic for a given seed, and
    the samples for ``trials=t`` are a prefix of those for ``trials=t+1``.
    """
    A = as_matrix(A)
    N = A.shape[1]
    if trials < 1 or not 1 <= k <= N:
        raise ValueError("need trials >= 1 and 1 <= k <= N")
    rng = np.random.default_rng(seed)
    G = A.T @ A
    best = 0.0
    for start in range(0, trials, _CHUNK):
        idx = _random_subsets(rng, N, k, min(_CHUNK, trials - start))
        best = max(best, float(np.max(_delta_of(G, idx))))
    return best


def randomized_lower_bound_theta(A, k1, k2, trials, seed=0):
    """Max of ``sigma_max(A_S^T A_T)`` over ``trials`` random disjoint pairs."""
    A = as_matrix(A)
    N = A.shape[1]
    if trials < 1 or k1 < 1 or k2 < 1 or k1 + k2 > N:
        raise ValueError("need trials >= 1 and valid orders")
    rng = np.random.default_rng(seed)
    G = A.T @ A
    best = 0.0
    for start in range(0, trials, _CHUNK):
        # the k1 smallest keys form S and the next k2 form T: a uniform disjoint pair
        keys = rng.random((min(_CHUNK, trials - start), N))
        order = np.argsort(keys, axis=1)
        S = np.sort(order[:, :k1], axis=1)
        T = np.sort(order[:, k1:k1 + k2], axis=1)
        B = G[S[:, :, None], T[:, None, :]]
        best = max(best, float(np.max(_spectral_norms(B))))
    return best


@dataclass(frozen=True)
class LemmaWitness:
    """Outcome of a lemma check with the numbers that went into it."""

    holds: bool
    lhs: float
    rhs: float
    details: dict = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "holds", bool(self.holds))

    def __bool__(self):
        return bool(self.holds)


def _support(v, tol=0.0):
    return set(np.flatnonzero(np.abs(v) > tol).tolist())


def check_lemma1(A, u, v, k1, k2, lam, theta=None, tol=LEMMA_TOL):
    """Inner-product bound for a sparse ``u`` against a flat ``v``.

    With disjoint supports, ``u`` ``k1``-sparse, ``||v||_1 <= lam*k2`` and
    ``||v||_inf <= lam``, checks
    ``|<Au, Av>| <= theta_{k1,k2} * ||u||_2 * lam * sqrt(k2)``.
    ``theta`` may be passed in to avoid re-enumerating.
    """
    A = as_matrix(A)
    u = as_vector(u, "u")
    v = as_vector(v, "v")
    su, sv = _support(u), _support(v)
    if len(su) > k1:
        raise ValueError(f"u has {len(su)} nonzeros, more than k1={k1}")
    if su & sv:
        raise ValueError("u and v supports overlap")
    if lam < 0:
        raise ValueError("lambda must be nonnegative")
    l1, linf = float(np.abs(v).sum()), float(np.abs(v).max())
    if l1 > lam * k2 * (1 + 1e-12) + 1e-15 or linf > lam * (1 + 1e-12) + 1e-15:
        raise ValueError(f"v violates ||v||_1 <= lam*k2 or ||v||_inf <= lam (lam={lam})")
    if theta is None:
        theta = compute_theta(A, k1, k2).value
    lhs = abs(float((A @ u) @ (A @ v)))
    rhs = theta * float(np.linalg.norm(u)) * lam * math.sqrt(k2)
    return LemmaWitness(lhs <= rhs + tol, lhs, rhs,
                        {"theta": theta, "u_norm": float(np.linalg.norm(u)),
                         "v_l1": l1, "v_inf": linf, "lambda": lam})


def check_lemma3(A, k, kp, tau, tol=LEMMA_TOL, budget=DEFAULT_BUDGET):
    """Check ``theta_{k, tau*kp} <= sqrt(tau) * theta_{k, kp}`` by enumeration."""
    tau = as_fraction(tau, "tau")
    if tau < 1:
        raise ValueError("tau must be >= 1")
    big = tau * kp
    if big.denominator != 1:
        raise ValueError(f"tau*k' = {big} is not an integer")
    big = int(big)
    lhs = compute_theta(A, k, big, budget).value
    small = compute_theta(A, k, kp, budget).value
    rhs = math.sqrt(tau) * small
    return LemmaWitness(lhs <= rhs + tol, lhs, rhs,
                        {"theta_big": lhs, "theta_small": small, "tau": Fraction(tau)})
