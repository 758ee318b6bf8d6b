"""Containers for linear rational-expectations systems and their solutions.

System convention (right-hand-side form):

    Gamma0_t x_t = gamma_t + Gamma1_t x_{t-1} + Psi_t eps_t + Pi eta_t

with eps_t the structural shocks (V[eps] = I) and eta_t the endogenous
expectational errors.  Matrices are constant (2-d) or per-period (3-d with
leading time axis); Pi is always constant.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from tvpfactor.exceptions import DimensionMismatch


@dataclass
class ReSystem:
    Gamma0: np.ndarray
    Gamma1: np.ndarray
    Psi: np.ndarray
    Pi: np.ndarray
    gamma: np.ndarray | None = None

    n_x: int = field(init=False)
    n_eps: int = field(init=False)
    n_eta: int = field(init=False)

    def __post_init__(self):
        self.Gamma0 = np.asarray(self.Gamma0, dtype=float)
        self.Gamma1 = np.asarray(self.Gamma1, dtype=float)
        self.Psi = np.asarray(self.Psi, dtype=float)
        self.Pi = np.asarray(self.Pi, dtype=float)
        n = self.Gamma0.shape[-1]
        if self.Gamma0.shape[-2] != n or self.Gamma1.shape[-2:] != (n, n):
            raise DimensionMismatch("Gamma0/Gamma1 must be square and matching")
        if self.Psi.ndim == 1:
            self.Psi = self.Psi[:, None]
        if self.Pi.ndim == 1:
            self.Pi = self.Pi[:, None]
        if self.Psi.shape[-2] != n or self.Pi.shape[0] != n:
            raise DimensionMismatch("Psi/Pi row dimension must match Gamma0")
        self.n_x = n
        self.n_eps = self.Psi.shape[-1]
        self.n_eta = self.Pi.shape[1]
        if self.n_eta > n:
            raise DimensionMismatch("more expectational errors than equations")
        if self.gamma is None:
            self.gamma = (
                np.zeros(n) if self.Gamma0.ndim == 2 else np.zeros((self.Gamma0.shape[0], n))
            )
        else:
            self.gamma = np.asarray(self.gamma, dtype=float)

    @property
    def time_varying(self) -> bool:
        return self.Gamma0.ndim == 3

    @property
    def nobs(self) -> int | None:
        return self.Gamma0.shape[0] if self.time_varying else None

    def at(self, t: int) -> "ReSystem":
        """Constant-parameter slice at period t."""
        if not self.time_varying:
            return self

        def pick(arr, base_ndim):
            return arr[t] if arr.ndim == base_ndim + 1 else arr

        return ReSystem(
            Gamma0=self.Gamma0[t],
            Gamma1=self.Gamma1[t],
            Psi=pick(self.Psi, 2),
            Pi=self.Pi,
            gamma=pick(self.gamma, 1),
        )


@dataclass
class ReSolution:
    """Non-explosive VAR(1) solution x_t = Phi0 + Phi1 x_{t-1} + PhiEps eps_t.

    ``eta_map`` gives the implied expectational errors eta_t = eta_map @ eps_t
    (per period when time-varying).  ``existence``/``uniqueness`` follow the
    root-counting conditions; when existence fails the coefficient arrays are
    None and ``status`` names the failure.
    """

    Phi0: np.ndarray | None
    Phi1: np.ndarray | None
    PhiEps: np.ndarray | None
    existence: bool
    uniqueness: bool
    n_explosive: int | np.ndarray
    status: str = "ok"
    eta_map: np.ndarray | None = None

    @property
    def time_varying(self) -> bool:
        return self.Phi1 is not None and self.Phi1.ndim == 3

    def spectral_radius(self) -> float:
        if self.Phi1 is None:
            return np.nan
        phi = self.Phi1 if self.time_varying else self.Phi1[None]
        return max(np.abs(np.linalg.eigvals(p)).max() for p in phi)
