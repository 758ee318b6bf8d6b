"""Rational-expectations solvers: constant, per-period, and regime-switching.

The constant-parameter solver triangularizes the pencil by a stability-ordered
QZ decomposition, offsets the explosive block with the expectational errors,
and back-solves the stable block.  The time-varying solver applies the same
construction pointwise per period.  The regime-switching solver treats the
stacked regime-conditional expectation system jointly: regime solutions are
coupled through next-period conditional expectations and computed as the
fixed point of the stacked linear maps.
"""

from __future__ import annotations

import numpy as np

from tvpfactor.exceptions import NoConvergence, PeriodFailure, SingularPencil
from tvpfactor.numerics.qz import STABILITY_TOL, qz_decompose
from tvpfactor.random import SeedLike, make_rng
from tvpfactor.re_solver.system import ReSolution, ReSystem

_RCOND = 1e-10


def solve_cp(system: ReSystem, stability_tol: float = STABILITY_TOL) -> ReSolution:
    """Solve a constant-parameter linear RE system.

    Existence requires the explosive-root count m to equal the number of
    expectational errors with Q2 @ Pi invertible; m > n_eta and m < n_eta are
    reported through the existence/uniqueness flags, not raised.
    """
    if system.time_varying:
        raise ValueError("solve_cp requires constant matrices; use solve_tvp")
    n = system.n_x
    n_eta = system.n_eta
    fac = qz_decompose(system.Gamma0, system.Gamma1, stability_tol)
    m = fac.n_explosive
    n_stable = n - m

    if m > n_eta:
        return ReSolution(None, None, None, False, False, m, status="no_stable_solution")

    Q1, Q2 = fac.q_partition()
    Q2Pi = Q2 @ system.Pi
    if m == n_eta and m > 0:
        invertible = np.linalg.matrix_rank(Q2Pi, tol=_RCOND * max(1.0, np.abs(Q2Pi).max())) == m
        if not invertible:
            return ReSolution(None, None, None, False, False, m, status="q2pi_singular")
    if m < n_eta:
        # more errors than explosive roots: solutions exist but are not unique
        status = "indeterminate"
        unique = False
    else:
        status = "ok"
        unique = True

    Lam, Om = fac.Lambda, fac.Omega
    Q, Z = fac.Q, fac.Z
    gam = system.gamma
    Psi = system.Psi

    if m > 0:
        Phi = (Q1 @ system.Pi) @ np.linalg.pinv(Q2Pi, rcond=_RCOND)
        Tmat = np.hstack([np.eye(n_stable), -Phi])
        G0 = np.vstack(
            [Tmat @ Lam, np.hstack([np.zeros((m, n_stable)), np.eye(m)])]
        )
        G1 = np.vstack([Tmat @ Om, np.zeros((m, n))])
        lam22 = Lam[n_stable:, n_stable:]
        om22 = Om[n_stable:, n_stable:]
        const = np.concatenate(
            [Tmat @ (Q @ gam), np.linalg.solve(lam22 - om22, Q2 @ gam)]
        )
        impact = np.vstack([Tmat @ (Q @ Psi), np.zeros((m, system.n_eps))])
        eta_map = -np.linalg.pinv(Q2Pi, rcond=_RCOND) @ (Q2 @ Psi)
    else:
        G0 = Lam
        G1 = Om
        const = Q @ gam
        impact = Q @ Psi
        eta_map = np.zeros((n_eta, system.n_eps))

    G0_inv = np.linalg.inv(G0)
    Phi1 = (Z @ (G0_inv @ G1) @ Z.conj().T).real
    Phi0 = (Z @ (G0_inv @ const)).real
    PhiEps = (Z @ (G0_inv @ impact)).real

    return ReSolution(
        Phi0=Phi0,
        Phi1=Phi1,
        PhiEps=PhiEps,
        existence=True,
        uniqueness=unique,
        n_explosive=m,
        status=status,
        eta_map=np.asarray(eta_map).real,
    )


def solve_tvp(system: ReSystem, stability_tol: float = STABILITY_TOL) -> ReSolution:
    """Per-period solution of a time-varying linear RE system.

    Applies the constant-parameter construction pointwise; identical
    per-period matrices therefore reproduce :func:`solve_cp` at every t.

    Raises
    ------
    PeriodFailure
        Identifying the first period whose pencil fails or whose root count
        breaks the existence condition.
    """
    if not system.time_varying:
        raise ValueError("solve_tvp requires per-period matrices; use solve_cp")
    T = system.nobs
    n = system.n_x
    Phi0 = np.empty((T, n))
    Phi1 = np.empty((T, n, n))
    PhiEps = np.empty((T, n, system.n_eps))
    eta_map = np.empty((T, system.n_eta, system.n_eps))
    n_expl = np.empty(T, dtype=int)
    unique = True
    for t in range(T):
        try:
            sol = solve_cp(system.at(t), stability_tol)
        except SingularPencil as exc:
            raise PeriodFailure(t, str(exc)) from exc
        if not sol.existence:
            raise PeriodFailure(t, f"status {sol.status} (m={sol.n_explosive})")
        unique = unique and sol.uniqueness
        Phi0[t] = sol.Phi0
        Phi1[t] = sol.Phi1
        PhiEps[t] = sol.PhiEps
        eta_map[t] = sol.eta_map
        n_expl[t] = sol.n_explosive
    return ReSolution(
        Phi0=Phi0,
        Phi1=Phi1,
        PhiEps=PhiEps,
        existence=True,
        uniqueness=unique,
        n_explosive=n_expl,
        status="ok",
        eta_map=eta_map,
    )


def solve_rs(
    regimes: list[ReSystem],
    transition: np.ndarray,
    n_endog: int,
    n_exo: int,
    stability_tol: float = STABILITY_TOL,
    max_iter: int = 5000,
    tol: float = 1e-13,
) -> ReSolution:
    """Jointly solve a regime-switching RE system in stacked-expectation form.

    Each regime's matrices are laid out over x_t = (y_t', e_t', dE_t')' where
    dE_t stacks the regime-conditional expectations E_t[y_{t+1} | s_{t+1}=s']
    across s' (the dot/ddot construction, with the transition weights already
    inside Gamma0).  Row layout: n_endog structural rows, n_exo exogenous
    rows, then n_endog * n_s expectational-error identities.

    The regime solutions x_t = Phi0(s) + Phi1(s) x_{t-1} + PhiEps(s) eps_t
    are coupled through the consistency conditions
    dE-block of x_t = stack_s'( S_y (Phi0(s') + Phi1(s') x_t) ); the solver
    replaces the error identities with these conditions and iterates the
    stacked linear maps to their fixed point, starting from the per-regime
    pointwise solutions.  With one regime, or an identity transition, the
    fixed point is the per-regime constant-parameter solution itself.

    Returns a ReSolution whose leading axis indexes regimes.
    """
    n_s = len(regimes)
    transition = np.asarray(transition, dtype=float)
    if transition.shape != (n_s, n_s):
        raise ValueError(f"transition must be {n_s}x{n_s}")
    if np.abs(transition.sum(axis=1) - 1.0).max() > 1e-12 or np.any(transition < 0):
        raise ValueError("transition rows must be probabilities summing to 1")

    n = regimes[0].n_x
    n_de = n_endog * n_s
    if n != n_endog + n_exo + n_de:
        raise ValueError(
            f"state dim {n} inconsistent with n_endog={n_endog}, n_exo={n_exo}, n_s={n_s}"
        )
    n_struct = n_endog + n_exo

    # per-regime pointwise solves: initialization plus root-count diagnostics
    init = [solve_cp(reg, stability_tol) for reg in regimes]
    n_expl = np.array([sol.n_explosive for sol in init])
    if any(not sol.existence for sol in init):
        bad = next(s for s, sol in enumerate(init) if not sol.existence)
        return ReSolution(
            None, None, None, False, False, n_expl,
            status=f"regime {bad}: {init[bad].status}",
        )
    unique = all(sol.uniqueness for sol in init)

    Phi0 = np.array([sol.Phi0 for sol in init])
    Phi1 = np.array([sol.Phi1 for sol in init])
    PhiEps = np.array([sol.PhiEps for sol in init])

    S_y = np.zeros((n_endog, n))
    S_y[:, :n_endog] = np.eye(n_endog)
    E_de = np.zeros((n_de, n))
    E_de[:, n_struct:] = np.eye(n_de)

    n_eps = regimes[0].n_eps
    for _ in range(max_iter):
        W1 = np.vstack([S_y @ Phi1[sp] for sp in range(n_s)])
        w0 = np.concatenate([S_y @ Phi0[sp] for sp in range(n_s)])
        new0 = np.empty_like(Phi0)
        new1 = np.empty_like(Phi1)
        newe = np.empty_like(PhiEps)
        for s, reg in enumerate(regimes):
            A = np.vstack([reg.Gamma0[:n_struct], E_de - W1])
            B = np.vstack([reg.Gamma1[:n_struct], np.zeros((n_de, n))])
            b0 = np.concatenate([reg.gamma[:n_struct], w0])
            C = np.vstack([reg.Psi[:n_struct], np.zeros((n_de, n_eps))])
            A_inv = np.linalg.inv(A)
            new1[s] = A_inv @ B
            new0[s] = A_inv @ b0
            newe[s] = A_inv @ C
        change = max(
            np.abs(new1 - Phi1).max(), np.abs(new0 - Phi0).max(), np.abs(newe - PhiEps).max()
        )
        Phi0, Phi1, PhiEps = new0, new1, newe
        if change < tol:
            break
    else:
        raise NoConvergence(f"regime-switching fixed point: change {change:.2e}")

    return ReSolution(
        Phi0=Phi0,
        Phi1=Phi1,
        PhiEps=PhiEps,
        existence=True,
        uniqueness=unique,
        n_explosive=n_expl,
        status="ok",
        eta_map=np.array([sol.eta_map for sol in init]),
    )


def simulate_solution(
    solution: ReSolution,
    T: int,
    seed: SeedLike,
    x0: np.ndarray | None = None,
    eps: np.ndarray | None = None,
) -> tuple[np.ndarray, np.ndarray]:
    """Simulate x_{1:T} from a (constant or per-period) solution.

    Returns (path (T, n), eps (T, n_eps)); pass ``eps`` to reuse shocks.
    """
    if solution.Phi1 is None:
        raise ValueError(f"cannot simulate: {solution.status}")
    tv = solution.time_varying
    n = solution.Phi1.shape[-1]
    n_eps = solution.PhiEps.shape[-1]
    if eps is None:
        eps = make_rng(seed).standard_normal((T, n_eps))
    x = np.empty((T, n))
    prev = np.zeros(n) if x0 is None else np.asarray(x0, dtype=float)
    for t in range(T):
        P0 = solution.Phi0[t] if tv else solution.Phi0
        P1 = solution.Phi1[t] if tv else solution.Phi1
        Pe = solution.PhiEps[t] if tv else solution.PhiEps
        prev = P0 + P1 @ prev + Pe @ eps[t]
        x[t] = prev
    return x, eps


def system_residual(
    system: ReSystem, solution: ReSolution, x: np.ndarray, eps: np.ndarray
) -> float:
    """Max residual of the system equations along a simulated path.

    The expectational errors are free processes: at each period eta_t is
    solved by least squares and the reported residual is the component of
    Gamma0 x_t - gamma - Gamma1 x_{t-1} - Psi eps_t orthogonal to the span
    of Pi.  (In the time-varying case eta_t depends on x_{t-1} as well as
    eps_t, because the lagged state sits on the previous period's stable
    manifold.)
    """
    T = x.shape[0]
    worst = 0.0
    for t in range(1, T):
        sys_t = system.at(t) if system.time_varying else system
        r = (
            sys_t.Gamma0 @ x[t]
            - sys_t.gamma
            - sys_t.Gamma1 @ x[t - 1]
            - sys_t.Psi @ eps[t]
        )
        if sys_t.n_eta > 0:
            eta, *_ = np.linalg.lstsq(sys_t.Pi, r, rcond=None)
            r = r - sys_t.Pi @ eta
        worst = max(worst, np.abs(r).max())
    return worst
