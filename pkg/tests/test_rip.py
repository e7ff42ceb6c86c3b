import itertools
import math

import numpy as np
import pytest

from oracles import delta_bruteforce, theta_bruteforce, unit_gaussian
from priorcs.rip import (EnumerationBudgetError, check_lemma1, check_lemma3, compute_delta,
                         compute_theta, delta_of_support, randomized_lower_bound_delta,
                         randomized_lower_bound_theta, theta_of_supports)


def test_orthonormal_columns_have_zero_constants():
    Q, _ = np.linalg.qr(np.random.default_rng(0).standard_normal((6, 4)))
    for k in range(1, 5):
        assert compute_delta(Q, k).value <= 1e-12
    assert compute_theta(Q, 2, 2).value <= 1e-12
    assert compute_theta(np.eye(5), 1, 3).value == 0


def test_delta_examples():
    assert compute_delta(np.diag([1.0, 0.8]), 1).value == pytest.approx(0.36, abs=1e-12)
    A = np.array([[1.0, 1.0, 0.0], [0.0, 0.0, 1.0]])
    r = compute_delta(A, 2)
    assert r.value == pytest.approx(1.0, abs=1e-12)
    assert r.argmax_support == (0, 1)


def test_theta_example():
    A = np.array([[1.0, 0.0, 1 / math.sqrt(2)], [0.0, 1.0, 1 / math.sqrt(2)]])
    r = compute_theta(A, 1, 1)
    assert r.value == pytest.approx(1 / math.sqrt(2), abs=1e-12)
    assert r.argmax_supports == ((0,), (2,))


def test_matches_bruteforce():
    rng = np.random.default_rng(1)
    A = unit_gaussian(rng, 5, 9)
    for k in range(1, 4):
        assert abs(compute_delta(A, k).value - delta_bruteforce(A, k)) <= 1e-10
    for k1, k2 in [(1, 1), (1, 3), (2, 2), (3, 2)]:
        assert abs(compute_theta(A, k1, k2).value - theta_bruteforce(A, k1, k2)) <= 1e-10


def test_theta_symmetric_in_orders():
    rng = np.random.default_rng(2)
    for _ in range(3):
        A = unit_gaussian(rng, 6, 12)
        assert abs(compute_theta(A, 1, 3).value - compute_theta(A, 3, 1).value) <= 1e-10
        assert abs(compute_theta(A, 2, 3).value - compute_theta(A, 3, 2).value) <= 1e-10


def test_witnesses_reproduce_values():
    A = unit_gaussian(np.random.default_rng(3), 6, 10)
    for k in (1, 2, 3):
        r = compute_delta(A, k)
        assert abs(delta_of_support(A, r.argmax_support) - r.value) <= 1e-10
    r = compute_theta(A, 2, 2)
    S, T = r.argmax_supports
    assert not set(S) & set(T)
    assert abs(theta_of_supports(A, S, T) - r.value) <= 1e-10


def test_budget_guard():
    A = np.random.default_rng(0).standard_normal((4, 30))
    with pytest.raises(EnumerationBudgetError, match="randomized"):
        compute_delta(A, 10)
    with pytest.raises(EnumerationBudgetError):
        compute_theta(A, 2, 2, budget=100)


def test_invalid_orders():
    with pytest.raises(ValueError):
        compute_delta(np.eye(3), 4)
    with pytest.raises(ValueError):
        compute_theta(np.eye(3), 2, 2)


def test_randomized_bounds():
    A = unit_gaussian(np.random.default_rng(4), 4, 6)
    exact = compute_delta(A, 2).value
    assert randomized_lower_bound_delta(A, 2, 2000, seed=0) == pytest.approx(exact, abs=1e-14)
    vals = [randomized_lower_bound_delta(A, 2, t, seed=5) for t in (1, 10, 100, 1000)]
    assert vals == sorted(vals)
    tvals = [randomized_lower_bound_theta(A, 1, 2, t, seed=5) for t in (1, 10, 100, 1000)]
    assert tvals == sorted(tvals)
    assert randomized_lower_bound_delta(A, 2, 50, seed=9) == randomized_lower_bound_delta(A, 2, 50, seed=9)
    assert tvals[-1] <= compute_theta(A, 1, 2).value + 1e-15


def test_randomized_below_exact_20x40():
    A = unit_gaussian(np.random.default_rng(5), 20, 40)
    assert randomized_lower_bound_delta(A, 2, 500, seed=1) <= compute_delta(A, 2).value + 1e-15
    assert randomized_lower_bound_theta(A, 1, 2, 500, seed=1) <= compute_theta(A, 1, 2).value + 1e-15


def _random_lemma1_instance(rng, N, k1, k2):
    perm = rng.permutation(N)
    u = np.zeros(N)
    u[perm[:k1]] = rng.standard_normal(k1)
    v = np.zeros(N)
    rest = perm[k1:]
    count = rng.integers(1, rest.size + 1)
    v[rest[:count]] = rng.standard_normal(count)
    lam = max(np.abs(v).max(), np.abs(v).sum() / k2) * rng.uniform(1, 2)
    return u, v, lam


def test_lemma1_examples_and_random():
    rng = np.random.default_rng(6)
    A = unit_gaussian(rng, 8, 16)
    u = np.zeros(16)
    u[0] = 1.0
    assert check_lemma1(A, u, np.zeros(16), 1, 2, 1.0).lhs == 0
    v = np.zeros(16)
    v[5] = -0.7
    w = check_lemma1(A, u, v, 1, 1, 0.7)
    assert w.holds and w.rhs == pytest.approx(compute_theta(A, 1, 1).value * 0.7)
    theta = compute_theta(A, 2, 3).value
    for _ in range(500):
        u, v, lam = _random_lemma1_instance(rng, 16, 2, 3)
        assert check_lemma1(A, u, v, 2, 3, lam, theta=theta)


def test_lemma1_preconditions():
    A = np.eye(4)
    u = np.array([1.0, 0, 0, 0])
    with pytest.raises(ValueError, match="overlap"):
        check_lemma1(A, u, u, 1, 1, 1.0)
    with pytest.raises(ValueError, match="nonzeros"):
        check_lemma1(A, np.ones(4), np.zeros(4), 1, 1, 1.0)
    with pytest.raises(ValueError, match="violates"):
        check_lemma1(A, u, np.array([0, 3.0, 0, 0]), 1, 1, 1.0)


def test_definition2_inner_products():
    rng = np.random.default_rng(7)
    A = unit_gaussian(rng, 8, 16)
    theta = compute_theta(A, 2, 2).value
    for _ in range(300):
        perm = rng.permutation(16)
        u = np.zeros(16)
        v = np.zeros(16)
        u[perm[:2]] = rng.standard_normal(2)
        v[perm[2:4]] = rng.standard_normal(2)
        assert abs((A @ u) @ (A @ v)) <= theta * np.linalg.norm(u) * np.linalg.norm(v) + 1e-12


def test_lemma3():
    A = unit_gaussian(np.random.default_rng(8), 8, 16)
    assert check_lemma3(A, 2, 1, 3)
    w = check_lemma3(A, 1, 2, 1)
    assert w.lhs == w.rhs
    assert check_lemma3(np.eye(6), 1, 1, 2).lhs == 0
    with pytest.raises(ValueError, match="integer"):
        check_lemma3(A, 1, 1, 1.5)
    with pytest.raises(ValueError):
        check_lemma3(A, 1, 1, 0.5)


def test_monotonicity_small():
    A = unit_gaussian(np.random.default_rng(9), 6, 10)
    d = [compute_delta(A, k).value for k in range(1, 5)]
    assert all(x <= y + 1e-12 for x, y in zip(d, d[1:]))
    th = {(i, j): compute_theta(A, i, j).value for i, j in itertools.product(range(1, 4), repeat=2)}
    for (i, j), val in th.items():
        if (i + 1, j) in th:
            assert val <= th[i + 1, j] + 1e-12
        if (i, j + 1) in th:
            assert val <= th[i, j + 1] + 1e-12
