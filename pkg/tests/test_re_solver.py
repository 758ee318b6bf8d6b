import numpy as np
import pytest

from oracles import forward_iteration_loading
from tvpfactor.dsge import ContinuousAR, NcgParams, build_linearized_system
from tvpfactor.exceptions import PeriodFailure
from tvpfactor.re_solver import (
    ReSystem,
    assemble_re_system,
    simulate_ncg_path,
    simulate_solution,
    solve_cp,
    solve_rs,
    solve_tvp,
    system_residual,
)

BASE = dict(alpha=0.3, beta=0.99, tau=2.0, delta=0.025, rho_z=0.9, sigma_z=0.01)


def scalar_forward_system(a, rho, sigma=1.0):
    """y_t = a E_t[y_{t+1}] + e_t with e AR(1); x = (y, e, E_t[y'])."""
    G0 = np.array([[1.0, -1.0, -a], [0.0, 1.0, 0.0], [1.0, 0.0, 0.0]])
    G1 = np.array([[0.0, 0.0, 0.0], [0.0, rho, 0.0], [0.0, 0.0, 1.0]])
    Psi = np.array([[0.0], [sigma], [0.0]])
    Pi = np.array([[0.0], [0.0], [1.0]])
    return ReSystem(Gamma0=G0, Gamma1=G1, Psi=Psi, Pi=Pi)


# ------------------------------------------------------------------- solve_cp
@pytest.mark.parametrize("a,rho", [(0.5, 0.8), (0.75, 0.8), (0.3, 0.5)])
def test_scalar_forward_loading_matches_forward_iteration(a, rho):
    sol = solve_cp(scalar_forward_system(a, rho))
    assert sol.existence and sol.uniqueness
    loading = sol.PhiEps[0, 0] / sol.PhiEps[1, 0]
    oracle = forward_iteration_loading(a, rho)
    assert abs(loading - oracle) < 1e-10
    assert abs(oracle - 1.0 / (1.0 - a * rho)) < 1e-12


def test_static_equation_loading_is_one():
    sol = solve_cp(scalar_forward_system(0.0, 0.8))
    assert abs(sol.PhiEps[0, 0] / sol.PhiEps[1, 0] - 1.0) < 1e-12


def test_ncg_full_depreciation_log_utility_slopes():
    params = NcgParams(alpha=0.3, beta=0.99, tau=1.0, delta=1.0, rho_z=0.9, sigma_z=0.01)
    lin = build_linearized_system(params, 1)
    exo = ContinuousAR(G=[[params.rho_z]], Sigma=[[params.sigma_z**2]])
    sol = solve_cp(assemble_re_system(lin, exo))
    assert sol.existence and sol.uniqueness
    # x = (c, k_next, z, E[c']); k_{t+1} = alpha k_t + z_t
    assert abs(sol.Phi1[1, 1] - params.alpha) < 1e-8
    assert abs(sol.PhiEps[1, 0] / params.sigma_z - 1.0) < 1e-8
    assert abs(sol.Phi1[1, 2] / params.rho_z - 1.0) < 1e-8


def test_cp_self_consistency_residual():
    sol = solve_cp(scalar_forward_system(0.5, 0.8))
    x, eps = simulate_solution(sol, 1000, seed=3)
    assert system_residual(scalar_forward_system(0.5, 0.8), sol, x, eps) < 1e-8


def test_no_stable_solution_flagged():
    # remove the expectational error: explosive root with no eta to offset it
    G0 = np.array([[1.0, -1.0, -0.5], [0.0, 1.0, 0.0], [1.0, 0.0, 0.0]])
    G1 = np.array([[0.0, 0.0, 0.0], [0.0, 0.8, 0.0], [0.0, 0.0, 1.0]])
    sys_bad = ReSystem(
        Gamma0=G0, Gamma1=G1, Psi=np.array([[0.0], [1.0], [0.0]]),
        Pi=np.zeros((3, 0)),
    )
    sol = solve_cp(sys_bad)
    assert not sol.existence
    assert sol.status == "no_stable_solution"


def test_indeterminacy_flagged():
    # a stable static system handed a spurious expectational error
    G0 = np.eye(2)
    G1 = np.array([[0.5, 0.0], [0.0, 0.3]])
    sys_ind = ReSystem(
        Gamma0=G0, Gamma1=G1, Psi=np.eye(2), Pi=np.array([[1.0], [0.0]])
    )
    sol = solve_cp(sys_ind)
    assert sol.existence
    assert not sol.uniqueness
    assert sol.status == "indeterminate"


# ------------------------------------------------------------------ solve_tvp
def test_tvp_constant_replication():
    cp = scalar_forward_system(0.5, 0.8)
    T = 10
    sys_tvp = ReSystem(
        Gamma0=np.repeat(cp.Gamma0[None], T, axis=0),
        Gamma1=np.repeat(cp.Gamma1[None], T, axis=0),
        Psi=cp.Psi,
        Pi=cp.Pi,
    )
    sol_tvp = solve_tvp(sys_tvp)
    sol_cp = solve_cp(cp)
    for t in range(T):
        assert np.abs(sol_tvp.Phi1[t] - sol_cp.Phi1).max() < 1e-10
        assert np.abs(sol_tvp.PhiEps[t] - sol_cp.PhiEps).max() < 1e-10


def test_tvp_alternating_regimes():
    sys_a = scalar_forward_system(0.3, 0.8)
    sys_b = scalar_forward_system(0.6, 0.8)
    T = 8
    G0 = np.array([sys_a.Gamma0 if t % 2 == 0 else sys_b.Gamma0 for t in range(T)])
    G1 = np.array([sys_a.Gamma1 if t % 2 == 0 else sys_b.Gamma1 for t in range(T)])
    sol = solve_tvp(ReSystem(Gamma0=G0, Gamma1=G1, Psi=sys_a.Psi, Pi=sys_a.Pi))
    ref_a, ref_b = solve_cp(sys_a), solve_cp(sys_b)
    for t in range(T):
        ref = ref_a if t % 2 == 0 else ref_b
        assert np.abs(sol.Phi1[t] - ref.Phi1).max() < 1e-10


def test_tvp_order2_residual_self_consistency():
    params = NcgParams(**BASE)
    lin = build_linearized_system(params, 2)
    exo = ContinuousAR(G=[[params.rho_z]], Sigma=[[params.sigma_z**2]])
    path = simulate_ncg_path(params, 200, seed=4)
    sys2 = assemble_re_system(lin, exo, path)
    sol = solve_tvp(sys2)
    x, eps = simulate_solution(sol, 200, seed=9)
    assert system_residual(sys2, sol, x, eps) < 1e-8


def test_tvp_period_failure_reports_period():
    cp = scalar_forward_system(0.5, 0.8)
    T = 5
    G0 = np.repeat(cp.Gamma0[None], T, axis=0)
    G0[3] = 0.0  # singular pencil at t=3
    G1 = np.repeat(cp.Gamma1[None], T, axis=0)
    G1[3] = 0.0
    with pytest.raises(PeriodFailure) as err:
        solve_tvp(ReSystem(Gamma0=G0, Gamma1=G1, Psi=cp.Psi, Pi=cp.Pi))
    assert err.value.t == 3


# ------------------------------------------------------------------- solve_rs
def rs_scalar_system(a_values, transition, rho=0.8, sigma=1.0):
    """Stacked-expectation form of y_t = a(s) E_t[y_{t+1}] + e_t."""
    n_s = len(a_values)
    regimes = []
    for s, a in enumerate(a_values):
        G0 = np.zeros((2 + n_s, 2 + n_s))
        G1 = np.zeros_like(G0)
        G0[0, 0] = 1.0
        G0[0, 1] = -1.0
        for sp in range(n_s):
            G0[0, 2 + sp] = -a * transition[s][sp]
        G0[1, 1] = 1.0
        G1[1, 1] = rho
        Psi = np.zeros((2 + n_s, 1))
        Psi[1, 0] = sigma
        Pi = np.zeros((2 + n_s, n_s))
        for sp in range(n_s):
            G0[2 + sp, 0] = 1.0
            G1[2 + sp, 2 + sp] = 1.0
            Pi[2 + sp, sp] = 1.0
        regimes.append(ReSystem(Gamma0=G0, Gamma1=G1, Psi=Psi, Pi=Pi))
    return regimes


def test_rs_single_regime_equals_cp():
    regimes = rs_scalar_system([0.5], [[1.0]])
    sol = solve_rs(regimes, np.array([[1.0]]), n_endog=1, n_exo=1)
    ref = solve_cp(regimes[0])
    assert np.abs(sol.Phi1[0] - ref.Phi1).max() < 1e-10
    assert np.abs(sol.PhiEps[0] - ref.PhiEps).max() < 1e-10


def test_rs_identity_transition_solves_independently():
    T_id = np.eye(2)
    regimes = rs_scalar_system([0.3, 0.6], T_id)
    sol = solve_rs(regimes, T_id, n_endog=1, n_exo=1)
    for s, a in enumerate([0.3, 0.6]):
        loading = sol.PhiEps[s][0, 0] / sol.PhiEps[s][1, 0]
        assert abs(loading - 1.0 / (1.0 - a * 0.8)) < 1e-10


def test_rs_iid_regimes_fixed_point():
    rho = 0.8
    a_vals = [0.3, 0.6]
    T_iid = np.array([[0.5, 0.5], [0.5, 0.5]])
    regimes = rs_scalar_system(a_vals, T_iid, rho=rho)
    sol = solve_rs(regimes, T_iid, n_endog=1, n_exo=1)
    # oracle: truncated forward iteration of phi(s) = 1 + a(s) rho sum_s' T phi(s')
    phi = np.zeros(2)
    for _ in range(200):
        phi = 1.0 + np.array(a_vals) * rho * (T_iid @ phi)
    for s in range(2):
        loading = sol.PhiEps[s][0, 0] / sol.PhiEps[s][1, 0]
        assert abs(loading - phi[s]) < 1e-10
    # regimes genuinely differ from their isolated solutions
    assert abs(phi[0] - 1.0 / (1.0 - 0.3 * rho)) > 1e-3
