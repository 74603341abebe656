"""solve_spd against dense references and its failure modes."""

import numpy as np
import pytest

from edapt import NumericError
from edapt.linalg import solve_spd


def test_matches_dense_solver():
    rng = np.random.default_rng(3)
    m = rng.standard_normal((8, 8))
    a = m @ m.T + 8.0 * np.eye(8)
    b = rng.standard_normal((8, 3))
    x = solve_spd(a, b)
    assert np.allclose(x, np.linalg.solve(a, b), rtol=1e-12, atol=1e-12)
    assert np.max(np.abs(a @ x - b)) < 1e-12


def test_vector_rhs_hand_case():
    # [[4,1],[1,3]] x = [1,2]; det = 11, x = [3-2, 8-1]/11 = [1/11, 7/11]
    a = np.array([[4.0, 1.0], [1.0, 3.0]])
    x = solve_spd(a, np.array([1.0, 2.0]))
    assert np.allclose(x, np.array([1.0, 7.0]) / 11.0, rtol=0.0, atol=1e-15)


def test_jitter_retry_recovers():
    # zeros is not factorable; the unit-jitter retry solves (0 + I) x = b
    b = np.array([0.0, 1.0, 2.0])
    x = solve_spd(np.zeros((3, 3)), b, jitter=1.0)
    assert np.array_equal(x, b)


def test_failure_without_jitter():
    with pytest.raises(NumericError):
        solve_spd(np.zeros((2, 2)), np.ones(2))


def test_failure_despite_jitter():
    # -100 I stays indefinite after a tiny-jitter retry
    with pytest.raises(NumericError):
        solve_spd(-100.0 * np.eye(2), np.ones(2), jitter=1e-10)


def test_non_finite_rejected():
    a = np.eye(2)
    bad = a.copy()
    bad[0, 0] = np.nan
    with pytest.raises(NumericError):
        solve_spd(bad, np.ones(2))
    with pytest.raises(NumericError):
        solve_spd(a, np.array([np.inf, 1.0]))


def test_residual_fn_is_consulted():
    rng = np.random.default_rng(11)
    m = rng.standard_normal((6, 6))
    a = m @ m.T + np.eye(6)
    b = rng.standard_normal((6, 2))
    calls = []

    def residual(x):
        calls.append(1)
        return b - a @ x

    x = solve_spd(a, b, residual_fn=residual)
    assert calls, "custom residual was never evaluated"
    assert np.max(np.abs(b - a @ x)) < 1e-12


def test_refinement_tightens_ill_scaled_system():
    # weight spreads like 1..1e4 leave the normal equations ill scaled;
    # the refined solve should still sit at machine-level residual
    rng = np.random.default_rng(7)
    m = rng.standard_normal((12, 12))
    a = m @ m.T + np.eye(12)
    a += 1e4 * np.outer(m[0], m[0])
    b = rng.standard_normal((12, 3))
    x = solve_spd(a, b)
    scale = np.linalg.norm(a) * np.linalg.norm(x)
    assert np.linalg.norm(a @ x - b) < 1e-12 * scale
