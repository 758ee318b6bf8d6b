"""Assemble full RE systems from structural rows, exogenous law and error identities.

For the growth model the state is x_t = (c_t, k_{t+1}, z_t, E_t[m'] ...) with
one conditional-expectation component per monomial of the linearization
order.  The assembled system stacks

    2 structural rows  (the linearized equilibrium conditions)
    1 exogenous row    (z_t = rho z_{t-1} + sigma eps_t)
    n_eta error rows   (m_t = E_{t-1}[m_t] + eta_{m,t})

in the right-hand-side convention Gamma0 x = gamma + Gamma1 x_{-1} + Psi eps
+ Pi eta.  Orders 2 and 3 need a simulated path of (c, k, k_next, z) to
evaluate the coefficient builders per period.
"""

from __future__ import annotations

import numpy as np

from tvpfactor.exceptions import PathLengthMismatch
from tvpfactor.dsge.exo import ContinuousAR
from tvpfactor.dsge.ncg import LinearizedSystem, NcgParams, build_linearized_system
from tvpfactor.random import SeedLike, make_rng
from tvpfactor.re_solver.system import ReSystem


def _monomial_row_factor(monomial: tuple, c: np.ndarray, z: np.ndarray) -> np.ndarray:
    """Gamma0 entry on the c_t column for one expectation-error identity.

    The identity for monomial m writes m_t = (factor) * c_t with the factor
    collecting the remaining terms of the product, e.g. c_t z_t = (z_t) c_t.
    """
    remaining = list(monomial)
    remaining.remove("c")
    out = np.ones_like(np.asarray(c, dtype=float))
    for sym in remaining:
        out = out * (c if sym == "c" else z)
    return out


def assemble_re_system(
    lin: LinearizedSystem,
    exo: ContinuousAR,
    path: dict | None = None,
) -> ReSystem:
    """Build the (constant or per-period) ReSystem for a linearized model.

    Parameters
    ----------
    lin : LinearizedSystem
        Structural rows and expectation monomials (order 1, 2 or 3).
    exo : ContinuousAR
        Scalar TFP law of motion; rho and the shock sd are read off G and
        Sigma.
    path : dict, optional
        Arrays ``c``, ``k``, ``k_next``, ``z`` of equal length T.  Required
        for orders >= 2 (the builders are evaluated along the path); ignored
        at order 1.

    Raises
    ------
    PathLengthMismatch
        Missing or ragged path arrays when the order requires them.
    """
    if exo.dim != 1:
        raise ValueError("growth-model assembly expects a scalar exogenous process")
    rho = float(exo.G.reshape(-1)[0])
    sigma = float(np.sqrt(exo.Sigma.reshape(-1)[0]))

    n_x = lin.n_x
    mons = lin.monomials
    n_eta = len(mons)
    z_col = 2
    exp_cols = list(range(3, 3 + n_eta))

    if lin.order == 1:
        A_x, A_lag, const = lin.structural_rows()
        G0 = np.zeros((n_x, n_x))
        G1 = np.zeros((n_x, n_x))
        G0[0:2] = A_x
        G1[0:2, 0:2] = -A_lag
        gamma = np.zeros(n_x)
        gamma[0:2] = -const
        G0[2, z_col] = 1.0
        G1[2, z_col] = rho
        G0[3, 0] = 1.0
        G1[3, exp_cols[0]] = 1.0
        Psi = np.zeros((n_x, 1))
        Psi[2, 0] = sigma
        Pi = np.zeros((n_x, 1))
        Pi[3, 0] = 1.0
        return ReSystem(Gamma0=G0, Gamma1=G1, Psi=Psi, Pi=Pi, gamma=gamma)

    if path is None:
        raise PathLengthMismatch(f"order-{lin.order} assembly requires a state path")
    try:
        c = np.asarray(path["c"], dtype=float)
        k = np.asarray(path["k"], dtype=float)
        k_next = np.asarray(path["k_next"], dtype=float)
        z = np.asarray(path["z"], dtype=float)
    except KeyError as exc:
        raise PathLengthMismatch(f"path missing array {exc}") from exc
    T = c.shape[0]
    if not (k.shape[0] == k_next.shape[0] == z.shape[0] == T):
        raise PathLengthMismatch("path arrays must have equal length")

    A_x, A_lag, const = lin.structural_rows(c=c, k=k, k_next=k_next, z=z)
    G0 = np.zeros((T, n_x, n_x))
    G1 = np.zeros((T, n_x, n_x))
    gamma = np.zeros((T, n_x))
    G0[:, 0:2, :] = A_x
    G1[:, 0:2, 0:2] = -A_lag
    gamma[:, 0:2] = -const
    G0[:, 2, z_col] = 1.0
    G1[:, 2, z_col] = rho

    Psi = np.zeros((n_x, 1))
    Psi[2, 0] = sigma
    Pi = np.zeros((n_x, n_eta))
    for j, mon in enumerate(mons):
        row = 3 + j
        G0[:, row, 0] = _monomial_row_factor(mon, c, z)
        G1[:, row, exp_cols[j]] = 1.0
        Pi[row, j] = 1.0
    return ReSystem(Gamma0=G0, Gamma1=G1, Psi=np.broadcast_to(Psi, (T, n_x, 1)).copy(),
                    Pi=Pi, gamma=gamma)


def simulate_ncg_path(
    params: NcgParams, T: int, seed: SeedLike, policy=None
) -> dict:
    """Simulate a (c, k, k_next, z) hat-deviation path for the growth model.

    By default the path comes from the first-order solution (adequate for
    evaluating the order-2/3 coefficient builders); pass a
    :class:`~tvpfactor.dsge.policy.PolicyFunction` to use the global
    nonlinear policy instead.
    """
    from tvpfactor.re_solver.gensys import simulate_solution, solve_cp

    rng = make_rng(seed)
    exo = ContinuousAR(G=np.array([[params.rho_z]]), Sigma=np.array([[params.sigma_z**2]]))

    if policy is not None:
        ss = policy  # PolicyFunction carries its own grids
        from tvpfactor.dsge.ncg import ncg_steady_state

        steady = ncg_steady_state(params)
        z_path = np.empty(T)
        zval = 0.0
        k_hat = np.empty(T + 1)
        k_hat[0] = 0.0
        c_hat = np.empty(T)
        eps = rng.standard_normal(T)
        for t in range(T):
            zval = params.rho_z * zval + params.sigma_z * eps[t]
            z_path[t] = zval
            k_level = steady.k * (1.0 + k_hat[t])
            c_hat[t] = ss.c(k_level, zval) / steady.c - 1.0
            k_hat[t + 1] = ss.k_next(k_level, zval) / steady.k - 1.0
        return {"c": c_hat, "k": k_hat[:-1], "k_next": k_hat[1:], "z": z_path}

    lin1 = build_linearized_system(params, 1)
    sys1 = assemble_re_system(lin1, exo)
    sol = solve_cp(sys1)
    x, _ = simulate_solution(sol, T, rng)
    # x = (c_t, k_{t+1}, z_t, E_t[c_{t+1}])
    k_hat = np.concatenate([[0.0], x[:-1, 1]])
    return {"c": x[:, 0], "k": k_hat, "k_next": x[:, 1], "z": x[:, 2]}


def time_varying_entry_paths(system: ReSystem, tol: float = 1e-14):
    """Paths of the time-varying Gamma0/Gamma1 entries of a per-period system.

    Returns (matrix (T, n_entries), labels).  An entry is time-varying when
    its range across periods exceeds ``tol`` relative to the matrix scale.
    """
    if not system.time_varying:
        raise ValueError("system has constant matrices")
    cols = []
    labels = []
    for name, arr in (("Gamma0", system.Gamma0), ("Gamma1", system.Gamma1)):
        scale = max(np.abs(arr).max(), 1.0)
        spread = arr.max(axis=0) - arr.min(axis=0)
        for i, j in zip(*np.nonzero(spread > tol * scale)):
            cols.append(arr[:, i, j])
            labels.append(f"{name}[{i},{j}]")
    return np.array(cols).T, labels
