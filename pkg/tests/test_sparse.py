import numpy as np
import pytest
from hypothesis import given, strategies as st

from weakbeam.errors import ParameterError, RankDeficiencyWarning
from weakbeam.sparse import (
    default_lambda_grid,
    least_squares,
    mstls,
    optimize_lambda,
)


def planted_system(seed, n_rows=200, n_cols=7, index=4, value=10.0, noise=0.0):
    rng = np.random.default_rng(seed)
    G = rng.standard_normal((n_rows, n_cols))
    G /= np.linalg.norm(G, axis=0)
    c = np.zeros(n_cols)
    c[index] = value
    b = G @ c
    if noise:
        b = b + noise * rng.standard_normal(n_rows)
    return G, b, c


def test_default_grid_is_logspaced():
    grid = default_lambda_grid()
    assert np.array_equal(grid, np.logspace(-10, 0, 100))
    assert default_lambda_grid(7).size == 7
    assert grid[0] == 1e-10 and grid[-1] == 1.0


# -------------------------------------------------------------- least squares

def test_least_squares_identity():
    b = np.array([3.0, -1.0, 2.5])
    assert np.allclose(least_squares(np.eye(3), b), b, rtol=0, atol=1e-14)


def test_least_squares_orthonormal_columns():
    rng = np.random.default_rng(1)
    Q, _ = np.linalg.qr(rng.standard_normal((30, 5)))
    b = rng.standard_normal(30)
    c = least_squares(Q, b)
    assert np.allclose(c, Q.T @ b, rtol=0, atol=1e-12)


def test_least_squares_recovers_planted_solution():
    rng = np.random.default_rng(2)
    G = rng.standard_normal((50, 6))
    c_true = rng.standard_normal(6)
    c = least_squares(G, G @ c_true)
    assert np.linalg.norm(c - c_true) <= 1e-10 * np.linalg.norm(c_true)


def test_least_squares_warns_on_rank_deficiency():
    rng = np.random.default_rng(3)
    G = rng.standard_normal((20, 3))
    G = np.column_stack([G, G[:, 0]])
    with pytest.warns(RankDeficiencyWarning):
        least_squares(G, rng.standard_normal(20))


def test_least_squares_shape_validation():
    with pytest.raises(ParameterError):
        least_squares(np.eye(3), np.ones(4))
    with pytest.raises(ParameterError):
        least_squares(np.ones(3), np.ones(3))


# ----------------------------------------------------------------------- mstls

def test_mstls_rejects_nonpositive_lambda():
    G, b, _ = planted_system(0)
    with pytest.raises(ParameterError):
        mstls(G, b, 0.0)
    with pytest.raises(ParameterError):
        mstls(G, b, -0.1)


def test_mstls_zero_rhs_gives_zero_model():
    G, _, _ = planted_system(0)
    assert np.array_equal(mstls(G, np.zeros(G.shape[0]), 1e-3), np.zeros(7))


def test_mstls_exact_sparse_input():
    # with b = G c* exactly, the least-squares start is already 1-sparse,
    # every admissible threshold keeps that entry, and an inadmissible
    # threshold (lower bound above the coefficient) empties the model
    G, b, c_true = planted_system(4)
    for lam in (1e-8, 1e-3, 0.05):
        c = mstls(G, b, lam)
        assert np.flatnonzero(c).tolist() == [4]
        assert abs(c[4] - c_true[4]) <= 1e-10 * abs(c_true[4])
    assert np.array_equal(mstls(G, b, 1.0), np.zeros(7))


def test_mstls_recovery_survives_noise():
    G, b, c_true = planted_system(5, noise=1e-3)
    c = mstls(G, b, 1e-2)
    assert np.flatnonzero(c).tolist() == [4]
    assert abs(c[4] - c_true[4]) <= 1e-2 * abs(c_true[4])


def test_mstls_is_deterministic():
    G, b, _ = planted_system(6, noise=1e-2)
    assert np.array_equal(mstls(G, b, 1e-3), mstls(G, b, 1e-3))


@given(seed=st.integers(0, 2**31 - 1), lam_pow=st.floats(-8, -0.5))
def test_mstls_output_is_a_thresholding_fixed_point(seed, lam_pow):
    # surviving coefficients must themselves satisfy the bounds that
    # defined the active set, and equal the restricted least-squares refit
    rng = np.random.default_rng(seed)
    G = rng.standard_normal((40, 5))
    b = rng.standard_normal(40)
    lam = 10.0 ** lam_pow
    c = mstls(G, b, lam)
    active = c != 0.0
    if not active.any():
        return
    norm_b = np.linalg.norm(b)
    col_norms = np.linalg.norm(G, axis=0)
    lower = lam * np.maximum(1.0, norm_b / col_norms)
    upper = (1.0 / lam) * np.minimum(1.0, norm_b / col_norms)
    assert np.all(np.abs(c[active]) >= lower[active])
    assert np.all(np.abs(c[active]) <= upper[active])
    refit = least_squares(G[:, active], b)
    assert np.allclose(c[active], refit, rtol=1e-12, atol=0)


# ------------------------------------------------------------ threshold sweep

def test_sweep_recovers_planted_support_under_noise():
    for seed in range(5):
        G, b, c_true = planted_system(seed, noise=1e-3)
        sol = optimize_lambda(G, b)
        assert sol.support == (4,)
        assert sol.nnz == 1
        assert abs(sol.coefficients[4] - c_true[4]) <= 1e-2 * abs(c_true[4])
        assert sol.relative_residual <= 1e-2


def test_sweep_loss_minimum_sits_near_one_active_term():
    G, b, _ = planted_system(7, noise=1e-3)
    sol = optimize_lambda(G, b)
    losses = sol.loss_curve[:, 1]
    assert losses.min() == pytest.approx(1.0 / 7.0, abs=1e-2)
    # the dense end of the grid keeps everything: misfit 0, penalty 1
    assert losses[0] == pytest.approx(1.0, abs=1e-6)


def test_sweep_picks_smallest_minimizing_lambda():
    G, b, _ = planted_system(8, noise=1e-3)
    sol = optimize_lambda(G, b)
    grid, losses = sol.loss_curve[:, 0], sol.loss_curve[:, 1]
    assert np.all(np.diff(grid) > 0)
    assert sol.lambda_hat == grid[np.argmin(losses)]
    first = np.flatnonzero(losses == losses.min())[0]
    assert sol.lambda_hat == grid[first]


def test_sweep_zero_rhs_short_circuits():
    G, _, _ = planted_system(9)
    sol = optimize_lambda(G, np.zeros(G.shape[0]))
    assert np.array_equal(sol.coefficients, np.zeros(7))
    assert sol.lambda_hat == 1e-10
    assert sol.relative_residual == 0.0
    assert sol.support == ()
    assert sol.loss_curve.shape == (100, 2)


def test_sweep_reports_consistent_residual():
    G, b, _ = planted_system(10, noise=1e-2)
    sol = optimize_lambda(G, b)
    want = np.linalg.norm(b - G @ sol.coefficients) / np.linalg.norm(b)
    assert sol.relative_residual == pytest.approx(want, rel=1e-12)


def test_sweep_accepts_custom_grid():
    G, b, _ = planted_system(11, noise=1e-3)
    grid = np.logspace(-5, -1, 9)
    sol = optimize_lambda(G, b, lambda_grid=grid)
    assert sol.lambda_hat in grid
    assert sol.loss_curve.shape == (9, 2)


def test_sweep_rejects_bad_grids():
    G, b, _ = planted_system(12)
    for bad in (np.array([]), np.array([-1.0, 1.0]), np.ones((3, 2)), np.array([0.0, 0.1])):
        with pytest.raises(ParameterError):
            optimize_lambda(G, b, lambda_grid=bad)


def test_sweep_is_deterministic():
    G, b, _ = planted_system(13, noise=1e-2)
    a = optimize_lambda(G, b)
    c = optimize_lambda(G, b)
    assert np.array_equal(a.coefficients, c.coefficients)
    assert a.lambda_hat == c.lambda_hat
    assert np.array_equal(a.loss_curve, c.loss_curve)
