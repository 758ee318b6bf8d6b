"""RBC model (NCG plus an endogenous labor margin): steady state, order-1 system."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from tvpfactor.exceptions import InfeasibleParams
from tvpfactor.dsge.ncg import NcgParams


@dataclass(frozen=True)
class RbcParams(NcgParams):
    """NCG parameters plus labor-disutility scale chi and inverse Frisch kappa."""

    chi: float = 1.0
    kappa: float = 1.0

    def __post_init__(self):
        super().__post_init__()
        if self.chi <= 0.0:
            raise InfeasibleParams(f"chi must be positive, got {self.chi}")
        if self.kappa < 0.0:
            raise InfeasibleParams(f"kappa must be nonnegative, got {self.kappa}")


@dataclass(frozen=True)
class RbcSteadyState:
    """Closed-form RBC steady state.

    lambda_r = 1 - beta(1 - delta) is the Euler-equation slope on the expected
    rental rate; zeta2 = r/alpha - delta, zeta1 = (alpha/r)^{1/(1-alpha)} zeta2
    give consumption per unit of labor, zeta3 = (1-alpha)/chi * (k/l)^alpha
    the labor-supply scale.
    """

    r: float
    w: float
    l: float
    c: float
    k: float
    y: float
    c_star: float
    k_star: float
    lambda_r: float
    zeta1: float
    zeta2: float
    zeta3: float


def rbc_steady_state(params: RbcParams) -> RbcSteadyState:
    """Evaluate the closed-form steady state of the RBC model.

    Raises
    ------
    InfeasibleParams
        When implied consumption is non-positive (zeta2 <= 0).
    """
    a, b, tau, d = params.alpha, params.beta, params.tau, params.delta
    chi, kap = params.chi, params.kappa

    r = 1.0 / b - (1.0 - d)
    kl = (a / r) ** (1.0 / (1.0 - a))        # capital-labor ratio
    w = (1.0 - a) * kl**a
    zeta2 = r / a - d
    zeta1 = kl * zeta2
    if zeta1 <= 0.0:
        raise InfeasibleParams(f"implied consumption share {zeta1} <= 0")
    zeta3 = w / chi
    # chi l^kappa = w c^{-tau} with c = zeta1 l
    l = (zeta3 * zeta1 ** (-tau)) ** (1.0 / (tau + kap))
    c = zeta1 * l
    k = kl * l
    y = k**a * l ** (1.0 - a)
    return RbcSteadyState(
        r=r, w=w, l=l, c=c, k=k, y=y,
        c_star=c / y, k_star=k / y,
        lambda_r=1.0 - b * (1.0 - d),
        zeta1=zeta1, zeta2=zeta2, zeta3=zeta3,
    )


def rbc_linear_system(params: RbcParams):
    """First-order RBC system with labor and wage substituted out.

    Combining the linearized wage, rental-rate and labor-supply conditions
    eliminates (l_hat, w_hat), leaving x_t = (c_t, k_{t+1}, z_t, E_t[c_{t+1}])
    with the zero-sum structural rows

        row_x @ x_t + row_lag @ (c_{t-1}, k_t) = 0 .

    Returns (A_x (2,4), A_lag (2,2), steady_state).  As kappa -> inf the rows
    converge to the NCG order-1 system (inelastic labor).
    """
    ss = rbc_steady_state(params)
    a, tau, kap = params.alpha, params.tau, params.kappa
    rho = params.rho_z
    g = ss.lambda_r
    denom = a + kap
    # l_hat = (z + a k_hat - tau c_hat) / (a + kappa)
    A_x = np.array(
        [
            [ss.c_star + (1.0 - a) * tau / denom, ss.k_star,
             -(1.0 + (1.0 - a) / denom), 0.0],
            [-tau, g * (1.0 - a) * kap / denom,
             -g * rho * (1.0 + kap) / denom, tau + g * (1.0 - a) * tau / denom],
        ]
    )
    A_lag = np.array(
        [
            [0.0, -((1.0 - params.delta) * ss.k_star + a + (1.0 - a) * a / denom)],
            [0.0, 0.0],
        ]
    )
    return A_x, A_lag, ss
