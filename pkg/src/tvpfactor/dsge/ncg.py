"""Neoclassical growth model: steady state and linearized systems of order 1-3.

The model in proportional deviations (x_hat = x / x_ss - 1) around the
deterministic steady state, with both equilibrium conditions normalized by
steady-state output:

    resource:  c* c_t + k* k_{t+1} - (1-d) k* k_t = e^{z_t} (1+k_t)^a - 1   (in hats)
    euler:     (1+c_t)^{-tau} = beta E_t[(1+c_{t+1})^{-tau} (1-d + r e^{z_{t+1}} (1+k_{t+1})^{a-1})]

Order-p truncations keep polynomial terms up to total degree p.  The
time-varying coefficients of the order-2 and order-3 systems ("builders") are
polynomials of degree p-1 in (c_t, k_t, k_{t+1}, z_t); evaluating them at the
steady state recovers the lower-order coefficients they extend.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from tvpfactor.exceptions import InfeasibleParams

Array = np.ndarray


@dataclass(frozen=True)
class NcgParams:
    """Structural parameters (capital share, discounting, risk aversion,
    depreciation, TFP persistence and shock scale)."""

    alpha: float
    beta: float
    tau: float
    delta: float
    rho_z: float = 0.9
    sigma_z: float = 0.01

    def __post_init__(self):
        if not 0.0 < self.alpha < 1.0:
            raise InfeasibleParams(f"alpha must be in (0,1), got {self.alpha}")
        if not 0.0 < self.beta < 1.0:
            raise InfeasibleParams(f"beta must be in (0,1), got {self.beta}")
        if self.tau <= 0.0:
            raise InfeasibleParams(f"tau must be positive, got {self.tau}")
        if not 0.0 < self.delta <= 1.0:
            raise InfeasibleParams(f"delta must be in (0,1], got {self.delta}")
        if abs(self.rho_z) >= 1.0:
            raise InfeasibleParams(f"|rho_z| must be < 1, got {self.rho_z}")
        if self.sigma_z < 0.0:
            raise InfeasibleParams(f"sigma_z must be nonnegative, got {self.sigma_z}")
        if self.beta * (1.0 - self.delta) >= 1.0:
            raise InfeasibleParams("beta*(1-delta) must be < 1 so that r > 0")


@dataclass(frozen=True)
class SteadyState:
    """Closed-form steady state and the constants reused by the linearizations.

    gamma = 1 - beta(1-delta); nu1 = alpha-1, nu2 = nu1(alpha-2),
    nu3 = nu2(alpha-3); omega1 = tau(tau+1), omega2 = omega1(tau+2).
    """

    r: float
    k: float
    c: float
    y: float
    k_star: float
    c_star: float
    gamma: float
    nu1: float
    nu2: float
    nu3: float
    omega1: float
    omega2: float


def ncg_steady_state(params: NcgParams) -> SteadyState:
    """Evaluate the closed-form steady state.

    Raises
    ------
    InfeasibleParams
        If steady-state consumption is non-positive.
    """
    a, b, tau, d = params.alpha, params.beta, params.tau, params.delta
    r = 1.0 / b - (1.0 - d)
    k = (a / r) ** (1.0 / (1.0 - a))
    y = k**a
    c = y - d * k
    if c <= 0.0:
        raise InfeasibleParams(f"steady-state consumption {c} <= 0")
    nu1 = a - 1.0
    nu2 = nu1 * (a - 2.0)
    omega1 = tau * (tau + 1.0)
    return SteadyState(
        r=r,
        k=k,
        c=c,
        y=y,
        k_star=k / y,
        c_star=c / y,
        gamma=1.0 - b * (1.0 - d),
        nu1=nu1,
        nu2=nu2,
        nu3=nu2 * (a - 3.0),
        omega1=omega1,
        omega2=omega1 * (tau + 2.0),
    )


@dataclass(frozen=True)
class CoefficientBuilder:
    """One named coefficient of the linearized system.

    ``degree`` is the polynomial degree in (c_t, k_t, k_next, z_t): 0 for
    order-1 constants, 1 for order-2 builders, 2 for order-3 builders.
    ``fn(c, k, k_next, z)`` accepts scalars or equal-shape arrays.
    """

    name: str
    degree: int
    fn: Callable[[Array, Array, Array, Array], Array]

    def __call__(self, c=0.0, k=0.0, k_next=0.0, z=0.0):
        return self.fn(np.asarray(c), np.asarray(k), np.asarray(k_next), np.asarray(z))


#: monomials in (c_{t+1}, z_{t+1}) whose conditional expectations appear as
#: forward states, per order; the expectational-error vector stacks the same
#: monomials evaluated at t
EXPECTATION_MONOMIALS = {
    1: [("c",)],
    2: [("c",), ("c", "c"), ("c", "z")],
    3: [("c",), ("c", "c"), ("c", "z"), ("c", "c", "c"), ("c", "z", "z"), ("c", "c", "z")],
}


@dataclass
class LinearizedSystem:
    """Structural block of the order-p linearization, zero-sum convention.

    The two equilibrium conditions are stored as

        row_x(t) @ x_t + row_lag(t) @ (c_{t-1}, k_t) + const = 0

    with x_t = (c_t, k_{t+1}, z_t, E_t[m] for m in expectation monomials).
    ``coefficients`` maps entry names to builders; ``x_coeff_names`` /
    ``lag_coeff_names`` give, per equation, the builder name or a constant
    for each position.
    """

    order: int
    params: NcgParams
    steady: SteadyState
    coefficients: dict[str, CoefficientBuilder]
    x_labels: list[str]
    monomials: list[tuple]
    x_entries: list[list]      # 2 rows, each len(x_labels): name | float
    lag_entries: list[list]    # 2 rows, each length 2 (on c_{t-1}, k_t)
    constants: np.ndarray      # length 2

    @property
    def n_x(self) -> int:
        return len(self.x_labels)

    def structural_rows(self, c=0.0, k=0.0, k_next=0.0, z=0.0):
        """Evaluate the two structural rows at a point (or arrays) of the state.

        Returns (A_x (..., 2, n_x), A_lag (..., 2, 2), const (2,)).
        """
        c, k, k_next, z = np.broadcast_arrays(
            np.asarray(c, dtype=float),
            np.asarray(k, dtype=float),
            np.asarray(k_next, dtype=float),
            np.asarray(z, dtype=float),
        )
        shape = c.shape
        A_x = np.zeros(shape + (2, self.n_x))
        A_lag = np.zeros(shape + (2, 2))
        for i, row in enumerate(self.x_entries):
            for j, entry in enumerate(row):
                A_x[..., i, j] = (
                    self.coefficients[entry](c, k, k_next, z)
                    if isinstance(entry, str)
                    else entry
                )
        for i, row in enumerate(self.lag_entries):
            for j, entry in enumerate(row):
                A_lag[..., i, j] = (
                    self.coefficients[entry](c, k, k_next, z)
                    if isinstance(entry, str)
                    else entry
                )
        return A_x, A_lag, self.constants.copy()


def build_linearized_system(params: NcgParams, order: int) -> LinearizedSystem:
    """Instantiate the order-1/2/3 linearized system from steady-state constants.

    The coefficient builders follow the psi-naming of the second- and
    third-order expansions; every builder is an exact polynomial coefficient
    of the order-p Taylor truncation (verified symbolically in the test
    suite), and evaluating an order-p builder at the origin reproduces the
    order-(p-1) coefficient it extends.
    """
    if order not in (1, 2, 3):
        raise ValueError(f"order must be 1, 2 or 3, got {order}")
    ss = ncg_steady_state(params)
    a, tau, d = params.alpha, params.tau, params.delta
    rho, sig = params.rho_z, params.sigma_z
    g, n1, n2, n3 = ss.gamma, ss.nu1, ss.nu2, ss.nu3
    w1, w2 = ss.omega1, ss.omega2
    psi_a1 = -((1.0 - d) * ss.k_star + a)

    def B(name, degree, fn):
        return name, CoefficientBuilder(name, degree, fn)

    coeffs = dict(
        [
            B("psi_a1", 0, lambda c, k, kn, z: np.full_like(c, psi_a1, dtype=float)),
        ]
    )
    if order >= 2:
        coeffs.update(
            [
                B("psi_b1", 1, lambda c, k, kn, z: psi_a1 - 0.5 * a * n1 * k - a * z),
                B("psi_b2", 1, lambda c, k, kn, z: -(1.0 + 0.5 * z)),
                B("psi_b3", 1, lambda c, k, kn, z: -tau + 0.5 * w1 * c),
                B("psi_b4", 1, lambda c, k, kn, z: -g * n1 * (1.0 + rho * z) - 0.5 * g * n2 * kn),
                B("psi_b5", 1, lambda c, k, kn, z: -g * rho * (1.0 + 0.5 * rho * z)),
                B("psi_b6", 1, lambda c, k, kn, z: tau * (1.0 + g * n1 * kn)),
            ]
        )
    if order == 3:
        b1 = coeffs["psi_b1"].fn
        b2 = coeffs["psi_b2"].fn
        b3 = coeffs["psi_b3"].fn
        b4 = coeffs["psi_b4"].fn
        b5 = coeffs["psi_b5"].fn
        b6 = coeffs["psi_b6"].fn
        coeffs.update(
            [
                B("psi_c1", 2, lambda c, k, kn, z, _f=b1:
                  _f(c, k, kn, z) - a * n2 / 6.0 * k**2 - 0.5 * a * z**2 - 0.5 * a * n1 * k * z),
                B("psi_c2", 2, lambda c, k, kn, z, _f=b2: _f(c, k, kn, z) - z**2 / 6.0),
                B("psi_c3", 2, lambda c, k, kn, z, _f=b3: _f(c, k, kn, z) - w2 / 6.0 * c**2),
                B("psi_c4", 2, lambda c, k, kn, z, _f=b4:
                  _f(c, k, kn, z) - g * n3 / 6.0 * kn**2
                  - 0.5 * g * n1 * (rho**2 * z**2 + sig**2) - 0.5 * g * n2 * kn * rho * z),
                B("psi_c5", 2, lambda c, k, kn, z, _f=b5:
                  _f(c, k, kn, z) - g * rho**3 / 6.0 * z**2 - 0.5 * g * rho * sig**2),
                B("psi_c6", 2, lambda c, k, kn, z, _f=b6: _f(c, k, kn, z) + 0.5 * g * tau * n2 * kn**2),
                B("psi_c7", 2, lambda c, k, kn, z: -0.5 * w1 - 0.5 * g * w1 * n1 * kn + 0.0 * c),
                B("psi_c8", 2, lambda c, k, kn, z: g * tau * (1.0 + n1 * kn) + 0.0 * c),
            ]
        )

    monomials = EXPECTATION_MONOMIALS[order]
    labels = ["c", "k_next", "z"] + ["E[" + "*".join(m) + "']" for m in monomials]

    if order == 1:
        x_rows = [
            [ss.c_star, ss.k_star, -1.0, 0.0],
            [-tau, -g * n1, -g * rho, tau],
        ]
        lag_rows = [[0.0, "psi_a1"], [0.0, 0.0]]
        constants = np.zeros(2)
    elif order == 2:
        x_rows = [
            [ss.c_star, ss.k_star, "psi_b2", 0.0, 0.0, 0.0],
            ["psi_b3", "psi_b4", "psi_b5", "psi_b6", -0.5 * w1, g * tau],
        ]
        lag_rows = [[0.0, "psi_b1"], [0.0, 0.0]]
        constants = np.array([0.0, -0.5 * g * sig**2])
    else:
        x_rows = [
            [ss.c_star, ss.k_star, "psi_c2", 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
            ["psi_c3", "psi_c4", "psi_c5", "psi_c6", "psi_c7", "psi_c8",
             w2 / 6.0, 0.5 * g * tau, -0.5 * g * w1],
        ]
        lag_rows = [[0.0, "psi_c1"], [0.0, 0.0]]
        constants = np.array([0.0, -0.5 * g * sig**2])

    return LinearizedSystem(
        order=order,
        params=params,
        steady=ss,
        coefficients=coeffs,
        x_labels=labels,
        monomials=monomials,
        x_entries=x_rows,
        lag_entries=lag_rows,
        constants=constants,
    )
