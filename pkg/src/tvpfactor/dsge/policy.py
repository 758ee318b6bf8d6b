"""Global nonlinear solution of the growth model on a tensor grid.

Fixed-point iteration on the Euler operator: given a consumption policy
c_n(k, z), the updated policy at each node is

    c_{n+1}(k, z) = ( beta E[ c_n(k', z')^{-tau} (1 - d + a e^{z'} k'^{a-1}) ] )^{-1/tau},
    k' = e^z k^a + (1-d) k - c_n(k, z),

with the conditional expectation over z' ~ N(rho z, sigma^2) computed by
Gauss-Hermite quadrature and the policy interpolated by a bicubic spline.
The converged policy's Euler residuals are the module's convergence
certificate.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import RectBivariateSpline

from tvpfactor.exceptions import NoConvergence
from tvpfactor.dsge.ncg import NcgParams, ncg_steady_state


@dataclass(frozen=True)
class GridSpec:
    """Tensor grid: k covers +-k_width (proportional) around steady-state k,
    z covers +-z_width unconditional standard deviations."""

    n_k: int = 200
    n_z: int = 15
    k_width: float = 0.4
    z_width: float = 4.0
    n_quad: int = 9
    max_sweeps: int = 20_000
    tol: float = 1e-13


@dataclass
class PolicyFunction:
    """Converged policy on the grid with spline evaluators.

    The solution z-grid carries buffer nodes beyond the requested +-z_width
    band so the quadrature never extrapolates far; ``z_core`` slices out the
    requested band, on which the Euler residuals certify the solution.
    """

    k_grid: np.ndarray
    z_grid: np.ndarray
    c_values: np.ndarray          # (n_k, n_z_total)
    k_next_values: np.ndarray     # (n_k, n_z_total)
    euler_residuals: np.ndarray   # (n_k, n_z_total) relative residuals
    sweeps: int
    z_core: slice = slice(None)
    _c_spline: RectBivariateSpline = field(repr=False, default=None)
    _k_spline: RectBivariateSpline = field(repr=False, default=None)

    def c(self, k, z):
        return self._c_spline.ev(k, z)

    def k_next(self, k, z):
        return self._k_spline.ev(k, z)


def solve_policy_grid(params: NcgParams, grid: GridSpec = GridSpec()) -> PolicyFunction:
    """Solve for c(k, z) and k'(k, z) by Euler-operator iteration.

    Raises
    ------
    NoConvergence
        If the sup-norm policy change fails to fall below tolerance within
        the sweep budget.
    """
    ss = ncg_steady_state(params)
    a, b, tau, d = params.alpha, params.beta, params.tau, params.delta
    rho, sig = params.rho_z, params.sigma_z

    k_grid = np.linspace((1 - grid.k_width) * ss.k, (1 + grid.k_width) * ss.k, grid.n_k)
    nodes, weights = np.polynomial.hermite.hermgauss(grid.n_quad)
    weights = weights / np.sqrt(np.pi)

    sd_unc = sig / np.sqrt(1.0 - rho**2) if sig > 0 else 0.0
    if sd_unc > 0:
        half = grid.z_width * sd_unc
        dz = 2.0 * half / (grid.n_z - 1)
        # buffer nodes covering the quadrature reach beyond the core band
        reach = np.sqrt(2.0) * sig * nodes.max()
        n_buf = int(np.ceil(reach / dz)) + 1
        z_grid = np.arange(-(grid.n_z - 1) / 2 - n_buf, (grid.n_z - 1) / 2 + n_buf + 1) * dz
        z_core = slice(n_buf, n_buf + grid.n_z)
    else:
        z_grid = np.linspace(-1e-8, 1e-8, grid.n_z)
        z_core = slice(None)

    K = k_grid[:, None]
    Z = z_grid[None, :]
    resources = np.exp(Z) * K**a + (1.0 - d) * K

    # start from the saving rate of the closed-form full-depreciation policy
    c_vals = np.clip((1.0 - a * b) * np.exp(Z) * K**a, 1e-10, resources - 1e-10)

    def expectation_rhs(c_policy):
        spline = RectBivariateSpline(k_grid, z_grid, c_policy, kx=3, ky=3)
        k_next = resources - c_policy
        k_next_c = np.clip(k_next, 1e-10, None)
        acc = np.zeros_like(c_policy)
        for x, w in zip(nodes, weights):
            z_next = rho * Z + np.sqrt(2.0) * sig * x
            z_next_b = np.broadcast_to(z_next, c_policy.shape)
            c_next = np.clip(spline.ev(k_next_c.ravel(), z_next_b.ravel()), 1e-12, None)
            c_next = c_next.reshape(c_policy.shape)
            ret = 1.0 - d + a * np.exp(z_next_b) * k_next_c ** (a - 1.0)
            acc += w * c_next ** (-tau) * ret
        return b * acc

    # Damped successive approximation on the Euler operator.  The operator's
    # local gain through k' = resources - c can fall below -1 (full
    # depreciation), so the damping factor is halved whenever the iteration
    # starts expanding; a periodic geometric extrapolation of the elementwise
    # limit accelerates the ~beta contraction tail.
    sweep = 0
    prev_change = None
    lam = 1.0
    n_growing = 0
    for sweep in range(1, grid.max_sweeps + 1):
        target = np.clip(expectation_rhs(c_vals) ** (-1.0 / tau), 1e-10, resources - 1e-10)
        c_new = np.clip((1.0 - lam) * c_vals + lam * target, 1e-10, resources - 1e-10)
        delta = c_new - c_vals
        change = np.abs(delta).max() / max(c_vals.max(), 1e-10)
        if change < grid.tol:
            c_vals = c_new
            break
        if prev_change is not None:
            if change > prev_change:
                n_growing += 1
                if n_growing >= 3 and lam > 0.125:
                    lam *= 0.5
                    n_growing = 0
            else:
                n_growing = 0
                if sweep % 25 == 0:
                    mu = change / prev_change
                    if 0.2 < mu < 0.9999:
                        c_new = np.clip(
                            c_new + delta * (mu / (1.0 - mu)), 1e-10, resources - 1e-10
                        )
        prev_change = change
        c_vals = c_new
    else:
        raise NoConvergence(f"policy iteration: sup change {change:.2e} after {sweep} sweeps")

    residual = 1.0 - expectation_rhs(c_vals) ** (-1.0 / tau) / c_vals
    k_next = resources - c_vals
    return PolicyFunction(
        k_grid=k_grid,
        z_grid=z_grid,
        c_values=c_vals,
        k_next_values=k_next,
        euler_residuals=residual,
        sweeps=sweep,
        z_core=z_core,
        _c_spline=RectBivariateSpline(k_grid, z_grid, c_vals, kx=3, ky=3),
        _k_spline=RectBivariateSpline(k_grid, z_grid, k_next, kx=3, ky=3),
    )
