import numpy as np
import pytest

from oracles import var1_autocovariances, varma_autocovariances
from tvpfactor.exceptions import UnstableInput
from tvpfactor.re_solver import marginalize, marginalize_tvp


def theta_form_autocovariances(thetas, sigma, max_lag):
    """Autocovariances of u_t + sum Theta_j u_{t-j}, u ~ WN(0, sigma)."""
    mats = [np.eye(sigma.shape[0])] + [np.atleast_2d(t) for t in thetas]
    out = []
    for h in range(max_lag + 1):
        g = sum(
            mats[j] @ sigma @ mats[j + h].T
            for j in range(len(mats) - h)
        )
        out.append(np.atleast_2d(g))
    return np.array(out)


def test_bivariate_keep_one_matches_lyapunov_oracle():
    phi1 = np.array([[0.5, 0.2], [0.1, 0.4]])
    phi_eps = np.eye(2)
    model = marginalize(phi1, phi_eps, keep=[0])
    assert model.p <= 2 and model.q <= 1

    full = var1_autocovariances(phi1, phi_eps @ phi_eps.T, 6)
    oracle = full[:, :1, :1]
    implied = varma_autocovariances(model.phi, model.ma_impacts, 6)
    np.testing.assert_allclose(implied, oracle, atol=1e-8)

    # the innovations form reproduces the same autocovariances
    theta_acov = theta_form_autocovariances(model.theta, model.sigma, 6)
    varma_state = varma_autocovariances(
        model.phi, [np.eye(1)] + [np.atleast_2d(t) for t in model.theta], 0
    )
    # build full ARMA autocovs in theta form via the state-space oracle with
    # innovations scaled by chol(sigma)
    L = np.linalg.cholesky(model.sigma)
    theta_imp = [np.eye(1) @ L] + [np.atleast_2d(t) @ L for t in model.theta]
    implied_theta = varma_autocovariances(model.phi, theta_imp, 6)
    np.testing.assert_allclose(implied_theta, oracle, atol=1e-8)


def test_block_diagonal_keeps_pure_ar():
    phi1 = np.zeros((3, 3))
    phi1[:2, :2] = np.array([[0.5, 0.1], [0.0, 0.3]])
    phi1[2, 2] = 0.8
    phi_eps = np.zeros((3, 3))
    phi_eps[:2, :2] = np.array([[1.0, 0.2], [0.0, 0.7]])
    phi_eps[2, 2] = 0.5
    model = marginalize(phi1, phi_eps, keep=[0, 1])
    assert model.p == 1 and model.q == 0
    np.testing.assert_allclose(model.phi[0], phi1[:2, :2], atol=1e-12)
    np.testing.assert_allclose(model.ma_impacts[0], phi_eps[:2], atol=1e-12)


def test_keep_all_is_identity():
    phi1 = np.array([[0.5, 0.2], [0.1, 0.4]])
    phi_eps = np.array([[1.0, 0.0], [0.3, 0.9]])
    model = marginalize(phi1, phi_eps, keep=[0, 1])
    assert model.p == 1 and model.q == 0
    np.testing.assert_allclose(model.phi[0], phi1, atol=1e-12)
    np.testing.assert_allclose(model.ma_impacts[0], phi_eps, atol=1e-12)


def test_lag_order_bounds_random_systems():
    rng = np.random.default_rng(8)
    for _ in range(20):
        n = rng.integers(2, 6)
        phi1 = rng.standard_normal((n, n)) * 0.3
        if np.abs(np.linalg.eigvals(phi1)).max() >= 0.95:
            continue
        phi_eps = rng.standard_normal((n, n))
        k = int(rng.integers(1, n))
        keep = sorted(rng.choice(n, size=k, replace=False).tolist())
        model = marginalize(phi1, phi_eps, keep=keep)
        assert model.p <= n - k + 1
        assert model.q <= n - k


def test_intercept_preserves_mean():
    phi1 = np.array([[0.5, 0.2], [0.1, 0.4]])
    phi0 = np.array([1.0, -0.5])
    model = marginalize(phi1, np.eye(2), keep=[0], phi0=phi0)
    mu = np.linalg.solve(np.eye(2) - phi1, phi0)
    implied_mu = np.linalg.solve(
        np.eye(1) - sum(np.atleast_2d(p) for p in model.phi), np.atleast_1d(model.intercept)
    )
    assert abs(implied_mu[0] - mu[0]) < 1e-10


def test_unstable_input_raises():
    with pytest.raises(UnstableInput):
        marginalize(np.array([[1.01, 0.0], [0.0, 0.5]]), np.eye(2), keep=[0])


# ------------------------------------------------------------------------ TVP
def test_tvp_constant_matches_constant_marginalize():
    phi1 = np.array([[0.5, 0.2], [0.1, 0.4]])
    phi_eps = np.array([[1.0, 0.1], [0.0, 0.8]])
    T = 6
    tvp = marginalize_tvp(np.repeat(phi1[None], T, axis=0), phi_eps, keep=[0])
    const = marginalize(phi1, phi_eps, keep=[0])
    assert tvp.p == const.p and tvp.q == const.q
    for l in range(const.p):
        for t in range(T):
            np.testing.assert_allclose(tvp.phi[l][t], const.phi[l], atol=1e-12)
    for j in range(const.q + 1):
        for t in range(T):
            np.testing.assert_allclose(tvp.ma_impacts[j][t], const.ma_impacts[j], atol=1e-12)


def test_tvp_zero_offdiagonal_blocks_give_pure_var():
    T = 10
    rng = np.random.default_rng(2)
    phi1 = np.zeros((T, 3, 3))
    phi_eps = np.zeros((T, 3, 3))
    for t in range(T):
        phi1[t, :2, :2] = 0.3 * rng.standard_normal((2, 2)) * 0.5 + 0.2 * np.eye(2)
        phi1[t, 2, :2] = rng.standard_normal(2) * 0.1  # feedback from kept block is fine
        phi1[t, 2, 2] = 0.5
        phi_eps[t, :2, :2] = np.eye(2)
        phi_eps[t, 2, 2] = 1.0
    model = marginalize_tvp(phi1, phi_eps, keep=[0, 1])
    assert model.q == 0
    assert model.p == 1


def test_tvp_one_period_perturbation_has_local_support():
    phi1_c = np.array([[0.5, 0.2], [0.1, 0.4]])
    phi_eps = np.eye(2)
    T = 20
    phi1 = np.repeat(phi1_c[None], T, axis=0)
    t0 = 10
    phi1[t0] = phi1_c + np.array([[0.05, -0.02], [0.01, 0.03]])
    tvp = marginalize_tvp(phi1, phi_eps, keep=[0])
    const = marginalize(phi1_c, phi_eps, keep=[0])
    for t in range(T):
        diff = max(
            abs(tvp.phi[l][t] - const.phi[l]).max() for l in range(const.p)
        )
        if t == t0:
            assert diff > 1e-4
        else:
            assert diff < 1e-12
