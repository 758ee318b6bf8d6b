import numpy as np
import pytest
import sympy as sp

from tvpfactor.dsge import (
    ContinuousAR,
    MarkovChain,
    NcgParams,
    RbcParams,
    build_linearized_system,
    ncg_steady_state,
    rbc_linear_system,
    rbc_steady_state,
    simulate_exo,
)
from tvpfactor.exceptions import InfeasibleParams

BASE = dict(alpha=0.3, beta=0.99, tau=2.0, delta=0.025, rho_z=0.9, sigma_z=0.01)


# ---------------------------------------------------------------- steady state
def test_ncg_steady_state_reference_values():
    ss = ncg_steady_state(NcgParams(**BASE))
    assert abs(ss.r - 0.035101) < 5e-6
    assert abs(ss.k - 21.43) < 0.01
    assert abs(ss.c - 1.972) < 0.001


def test_full_depreciation_rate():
    ss = ncg_steady_state(NcgParams(alpha=0.3, beta=0.99, tau=2.0, delta=1.0))
    assert abs(ss.r - 1.0 / 0.99) < 1e-12


def test_resource_share_identity_random_params():
    rng = np.random.default_rng(0)
    for _ in range(1000):
        p = NcgParams(
            alpha=rng.uniform(0.05, 0.95),
            beta=rng.uniform(0.8, 0.999),
            tau=rng.uniform(0.2, 10.0),
            delta=rng.uniform(0.005, 1.0),
            rho_z=rng.uniform(-0.99, 0.99),
            sigma_z=rng.uniform(1e-4, 0.1),
        )
        try:
            ss = ncg_steady_state(p)
        except InfeasibleParams:
            continue
        assert abs(ss.c_star + p.delta * ss.k_star - 1.0) < 1e-12
        assert abs(ss.k - (p.alpha / ss.r) ** (1 / (1 - p.alpha))) < 1e-9 * ss.k
        assert ss.c > 0


def test_infeasible_params_raise():
    with pytest.raises(InfeasibleParams):
        NcgParams(alpha=1.2, beta=0.99, tau=2.0, delta=0.025)
    with pytest.raises(InfeasibleParams):
        NcgParams(alpha=0.3, beta=0.5, tau=2.0, delta=0.0)  # delta out of range


# -------------------------------------------------- symbolic expansion oracle
def _taylor(expr, variables, order):
    eps = sp.Symbol("_eps")
    scaled = expr.subs({v: eps * v for v in variables}, simultaneous=True)
    return sp.series(scaled, eps, 0, order + 1).removeO().subs(eps, 1)


def _sympy_system(params, order):
    """Order-p truncation of the two equilibrium conditions with conditional
    expectations substituted, as a sympy expression pair in the state symbols."""
    a, b, tau, d = params.alpha, params.beta, params.tau, params.delta
    rho, sig = params.rho_z, params.sigma_z
    ss = ncg_steady_state(params)

    ch, kh, knh, zh = sp.symbols("ch kh knh zh")
    cn, zn = sp.symbols("cn zn")
    Ec, Ec2, Ecz, Ec3, Ecz2, Ec2z = sp.symbols("Ec Ec2 Ecz Ec3 Ecz2 Ec2z")

    f1 = (
        ss.c_star * (1 + ch)
        + ss.k_star * (1 + knh)
        - (1 - d) * ss.k_star * (1 + kh)
        - sp.exp(zh) * (1 + kh) ** a
    )
    poly1 = sp.expand(_taylor(f1, [ch, kh, knh, zh], order))

    f2 = (1 + ch) ** (-tau) - b * (1 + cn) ** (-tau) * (
        1 - d + ss.r * sp.exp(zn) * (1 + knh) ** (a - 1)
    )
    poly2 = sp.expand(_taylor(f2, [ch, cn, knh, zn], order))

    emap = {
        (0, 0): sp.Integer(1),
        (0, 1): rho * zh,
        (0, 2): rho**2 * zh**2 + sig**2,
        (0, 3): rho**3 * zh**3 + 3 * rho * zh * sig**2,
        (1, 0): Ec,
        (2, 0): Ec2,
        (3, 0): Ec3,
        (1, 1): Ecz,
        (1, 2): Ecz2,
        (2, 1): Ec2z,
    }
    expected = sp.Integer(0)
    for (i, j), coeff in sp.Poly(poly2, cn, zn).terms():
        expected += coeff.as_expr() * emap[(i, j)]
    return sp.expand(poly1), sp.expand(expected), (ch, kh, knh, zh, Ec, Ec2, Ecz, Ec3, Ecz2, Ec2z)


@pytest.mark.parametrize("order", [1, 2, 3])
def test_linearized_system_matches_symbolic_expansion(order):
    params = NcgParams(**BASE)
    lin = build_linearized_system(params, order)
    poly1, poly2, syms = _sympy_system(params, order)
    ch, kh, knh, zh, Ec, Ec2, Ecz, Ec3, Ecz2, Ec2z = syms

    exp_syms = [Ec, Ec2, Ecz, Ec3, Ecz2, Ec2z][: lin.n_x - 3]
    rng = np.random.default_rng(order)
    for _ in range(25):
        pt = dict(zip((ch, kh, knh, zh), rng.uniform(-0.05, 0.05, 4)))
        pt.update(dict(zip(exp_syms, rng.uniform(-0.05, 0.05, len(exp_syms)))))
        A_x, A_lag, const = lin.structural_rows(
            c=pt[ch], k=pt[kh], k_next=pt[knh], z=pt[zh]
        )
        x_vec = np.array([pt[ch], pt[knh], pt[zh]] + [pt[s] for s in exp_syms])
        lag_vec = np.array([0.0, pt[kh]])  # (c_{t-1} unused by either equation)
        mine = A_x @ x_vec + A_lag @ lag_vec + const
        truth = np.array(
            [float(poly1.subs(pt)), float(poly2.subs(pt))], dtype=float
        )
        np.testing.assert_allclose(mine, truth, atol=1e-12)


def test_order1_coefficient_psi_a1():
    params = NcgParams(**BASE)
    lin = build_linearized_system(params, 1)
    ss = lin.steady
    # lag coefficient on k_t: -( (1-delta) k* + alpha ); confirmed by the
    # symbolic oracle above
    expected = -((1 - params.delta) * ss.k_star + params.alpha)
    assert abs(lin.coefficients["psi_a1"]() - expected) < 1e-14


def test_order2_builders_reduce_to_order1_at_steady_state():
    params = NcgParams(**BASE)
    lin1 = build_linearized_system(params, 1)
    lin2 = build_linearized_system(params, 2)
    A1, L1, _ = lin1.structural_rows()
    A2, L2, _ = lin2.structural_rows()
    np.testing.assert_allclose(A2[:, :4], A1, atol=1e-12)
    np.testing.assert_allclose(L2, L1, atol=1e-12)


def test_order3_builders_reduce_to_order2_at_steady_state():
    # common builders agree exactly at the origin once the shock variance is
    # zeroed out (order 3 carries E[z'^2], E[z'^3] variance constants)
    params = NcgParams(**{**BASE, "sigma_z": 1e-12})
    lin2 = build_linearized_system(params, 2)
    lin3 = build_linearized_system(params, 3)
    A2, L2, _ = lin2.structural_rows()
    A3, L3, _ = lin3.structural_rows()
    np.testing.assert_allclose(A3[:, :6], A2, atol=1e-10)
    np.testing.assert_allclose(L3, L2, atol=1e-10)
    # psi_c1 at the origin equals psi_b1 at the origin even with sigma > 0
    lin3s = build_linearized_system(NcgParams(**BASE), 3)
    lin2s = build_linearized_system(NcgParams(**BASE), 2)
    assert abs(lin3s.coefficients["psi_c1"]() - lin2s.coefficients["psi_b1"]()) < 1e-14


def test_builder_degree_metadata():
    params = NcgParams(**BASE)
    for order, degree in [(2, 1), (3, 2)]:
        lin = build_linearized_system(params, order)
        prefix = "psi_b" if order == 2 else "psi_c"
        for name, builder in lin.coefficients.items():
            if name.startswith(prefix):
                assert builder.degree == degree


def test_order2_builders_are_affine():
    lin = build_linearized_system(NcgParams(**BASE), 2)
    rng = np.random.default_rng(1)
    for name in ["psi_b1", "psi_b2", "psi_b3", "psi_b4", "psi_b5", "psi_b6"]:
        f = lin.coefficients[name]
        p0 = rng.uniform(-0.05, 0.05, 4)
        p1 = rng.uniform(-0.05, 0.05, 4)
        mid = 0.5 * (p0 + p1)
        assert abs(f(*mid) - 0.5 * (f(*p0) + f(*p1))) < 1e-12


# ------------------------------------------------------------------------ RBC
def test_rbc_zeta2_reference_value():
    ss = rbc_steady_state(RbcParams(**BASE, chi=1.0, kappa=1.0))
    assert abs(ss.zeta2 - 0.0920) < 5e-4
    assert abs(ss.zeta1 - (0.3 / ss.r) ** (1 / 0.7) * ss.zeta2) < 1e-12


def test_rbc_nests_ncg_with_inelastic_labor():
    # kappa = 0 and chi tuned to the NCG marginal conditions puts l = 1
    ncg = ncg_steady_state(NcgParams(**BASE))
    w = (1 - 0.3) * ncg.k**0.3
    chi = w * ncg.c ** (-2.0)
    ss = rbc_steady_state(RbcParams(**BASE, chi=chi, kappa=0.0))
    assert abs(ss.l - 1.0) < 1e-10
    assert abs(ss.c - ncg.c) < 1e-8
    assert abs(ss.k - ncg.k) < 1e-7


def test_rbc_labor_foc_residual():
    p = RbcParams(**BASE, chi=2.0, kappa=0.5)
    ss = rbc_steady_state(p)
    residual = p.chi * ss.l**p.kappa - ss.w * ss.c ** (-p.tau)
    assert abs(residual) < 1e-10
    assert min(ss.l, ss.c, ss.k, ss.w) > 0


def test_rbc_linear_system_ncg_limit():
    p_rbc = RbcParams(**BASE, chi=1.0, kappa=1e9)
    A_rbc, L_rbc, _ = rbc_linear_system(p_rbc)
    lin = build_linearized_system(NcgParams(**BASE), 1)
    A_ncg, L_ncg, _ = lin.structural_rows()
    np.testing.assert_allclose(A_rbc, A_ncg, atol=1e-6)
    np.testing.assert_allclose(L_rbc, L_ncg, atol=1e-6)


# ------------------------------------------------------------------ exogenous
def test_ar_zero_noise_zero_start():
    proc = ContinuousAR(G=np.array([[0.9]]), Sigma=np.array([[0.0]]))
    path = simulate_exo(proc, 50, seed=3)
    assert np.abs(path).max() == 0.0


def test_ar_unconditional_variance():
    proc = ContinuousAR(G=np.array([[0.9]]), Sigma=np.array([[1.0]]))
    path = simulate_exo(proc, 100_000, seed=11)
    target = 1.0 / (1.0 - 0.81)
    assert abs(path.var() - target) / target < 0.03


def test_absorbing_markov_chain():
    chain = MarkovChain(states=np.array([[1.0], [2.0]]), T=np.eye(2), initial_state=0)
    values, idx = simulate_exo(chain, 100, seed=5)
    assert np.all(idx == 0)
    assert np.all(values == 1.0)


def test_markov_transition_validation():
    with pytest.raises(ValueError):
        MarkovChain(states=np.array([[0.0], [1.0]]), T=np.array([[0.5, 0.6], [0.5, 0.5]]))


def test_simulation_reproducible():
    proc = ContinuousAR(G=np.array([[0.5]]), Sigma=np.array([[1.0]]))
    a = simulate_exo(proc, 100, seed=7)
    b = simulate_exo(proc, 100, seed=7)
    np.testing.assert_array_equal(a, b)
