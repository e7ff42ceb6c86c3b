from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from priorcs.model import (ModelError, NoiseSpec, SupportEstimate, best_k_approx,
                           best_k_support, double_bracket, make_estimate, make_weights,
                           profile_of, weighted_norm)


def test_best_k_support_examples():
    assert best_k_support([0, 5, 0, -7], 1) == (3,)
    assert best_k_support([1, 2, 3, 4], 2) == (2, 3)
    assert best_k_support([2, -2, 0], 1) == (0,)


def test_best_k_support_pads_with_zero_entries():
    assert best_k_support([0, 0, 3, 0], 3) == (0, 1, 2)


def test_best_k_support_range():
    with pytest.raises(ModelError):
        best_k_support([1, 2], 3)
    with pytest.raises(ModelError):
        best_k_support([1, 2], 0)


@settings(max_examples=200, deadline=None)
@given(st.lists(st.floats(-100, 100), min_size=1, max_size=30), st.data())
def test_best_k_decomposition(xs, data):
    x = np.array(xs)
    k = data.draw(st.integers(1, x.size))
    head = best_k_approx(x, k)
    tail = x - head
    assert np.abs(head).sum() + np.abs(tail).sum() == pytest.approx(np.abs(x).sum(), rel=1e-12, abs=1e-12)
    assert np.count_nonzero(head) <= k
    assert np.abs(tail).max(initial=0) <= np.abs(head[list(best_k_support(x, k))]).min() + 0


def test_make_estimate_examples():
    assert make_estimate({0, 1}, 1, 1, 2, 10).indices == (0, 1)
    wrong = make_estimate({0, 1}, 1, 0, 2, 10)
    assert len(wrong) == 2 and not set(wrong) & {0, 1}
    est = make_estimate({0, 1, 2, 3}, Fraction(1, 2), Fraction(1, 2), 4, 10, seed=7)
    assert len(est) == 2 and len(set(est) & {0, 1, 2, 3}) == 1


def test_make_estimate_deterministic():
    a = make_estimate(range(5), 2, Fraction(2, 5), 5, 30, seed=3)
    b = make_estimate(range(5), 2, Fraction(2, 5), 5, 30, seed=3)
    assert a == b


@pytest.mark.parametrize("args, msg", [
    (({0, 1}, Fraction(1, 3), 1, 2, 10), "rho\\*k"),
    (({0, 1}, 2, 1, 2, 10), "exceeds \\|T0\\|"),
    (({0, 1}, 2, 0, 2, 4), "exceeds N - \\|T0\\|"),
])
def test_make_estimate_errors(args, msg):
    with pytest.raises(ModelError, match=msg):
        make_estimate(*args)


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 8), st.data())
def test_make_estimate_profile_roundtrip(k, data):
    N = 3 * k
    size = data.draw(st.integers(0, 2 * k))
    good = data.draw(st.integers(max(0, size - (N - k)), min(size, k)))
    rho = Fraction(size, k)
    alpha = Fraction(good, size) if size else Fraction(1)
    est = make_estimate(range(k), rho, alpha, k, N, seed=data.draw(st.integers(0, 99)))
    prof = profile_of(range(k), est, k)
    assert prof.rho == rho and prof.alpha == alpha and prof.alpha + prof.beta == 1


def test_profile_examples():
    p = profile_of({0, 1}, SupportEstimate((0, 1), 5), 2)
    assert (p.rho, p.alpha, p.beta) == (1, 1, 0)
    p = profile_of({0, 1}, SupportEstimate((1, 2), 5), 2)
    assert (p.rho, p.alpha, p.beta) == (1, Fraction(1, 2), Fraction(1, 2))
    p = profile_of({0, 1}, SupportEstimate((), 5), 2)
    assert (p.rho, p.alpha, p.beta) == (0, 1, 0)


def test_double_bracket():
    assert double_bracket(3) == 3
    assert double_bracket(3.2) == 4
    assert double_bracket(0) == 0
    assert double_bracket(Fraction(7, 2)) == 4
    with pytest.raises(ModelError):
        double_bracket(-0.5)
    z = np.random.default_rng(0).uniform(0, 100, 10**4)
    assert all(0 <= double_bracket(v) - v < 1 for v in z)


def test_weighted_norm_examples():
    x = np.array([1.0, -2.0, 3.0])
    assert weighted_norm(x, np.ones(3)) == 6.0
    assert weighted_norm([1, 1], [0, 1]) == 1.0
    assert weighted_norm([2, -3], [0.5, 0.5]) == 2.5
    with pytest.raises(ModelError):
        weighted_norm([1, 2], [1, 1, 1])


def test_weights_follow_estimate():
    w = make_weights(SupportEstimate((1, 3), 5), 0.25)
    assert np.array_equal(w.w, [1, 0.25, 1, 0.25, 1])
    assert np.array_equal(np.asarray(w), w.w)
    x = np.random.default_rng(0).standard_normal(5)
    assert weighted_norm(x, make_weights(SupportEstimate((1, 3), 5), 1.0).w) == pytest.approx(np.abs(x).sum())
    with pytest.raises(ModelError):
        make_weights(SupportEstimate((1,), 5), 1.5)


def test_support_estimate_validation():
    assert SupportEstimate([3, 1, 3], 5).indices == (1, 3)
    with pytest.raises(ModelError):
        SupportEstimate([5], 5)


def test_noise_spec_invariants():
    NoiseSpec("l2", 0.1, 0.2)
    with pytest.raises(ModelError):
        NoiseSpec("exact", 0.1, 0.1)
    with pytest.raises(ModelError):
        NoiseSpec("dantzig", 0.2, 0.1)
    with pytest.raises(ModelError):
        NoiseSpec("gaussian", sigma=-1)
