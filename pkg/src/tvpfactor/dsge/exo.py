"""Exogenous driving processes: continuous (possibly time-varying) AR and Markov chains."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union

import numpy as np

from tvpfactor.exceptions import DimensionMismatch, NonPsdCovariance
from tvpfactor.random import SeedLike, make_rng


@dataclass
class ContinuousAR:
    """e_{t+1} = G_t e_t + eps_{t+1}, eps ~ N(0, Sigma_t).

    ``G`` and ``Sigma`` may carry a leading time dimension for per-period
    dynamics; scalars are promoted to 1x1 matrices.
    """

    G: np.ndarray
    Sigma: np.ndarray
    e0: np.ndarray | None = None

    def __post_init__(self):
        self.G = np.atleast_2d(np.asarray(self.G, dtype=float))
        self.Sigma = np.atleast_2d(np.asarray(self.Sigma, dtype=float))
        n = self.G.shape[-1]
        if self.G.shape[-2] != n:
            raise DimensionMismatch("G must be square")
        if self.Sigma.shape[-2:] != (n, n):
            raise DimensionMismatch("Sigma shape incompatible with G")
        sig = self.Sigma if self.Sigma.ndim == 2 else self.Sigma[0]
        w = np.linalg.eigvalsh(0.5 * (sig + sig.T))
        if w.min() < -1e-10 * max(1.0, w.max()):
            raise NonPsdCovariance("Sigma must be positive semidefinite")
        if self.e0 is None:
            self.e0 = np.zeros(n)
        else:
            self.e0 = np.asarray(self.e0, dtype=float).reshape(n)

    @property
    def dim(self) -> int:
        return self.G.shape[-1]


@dataclass
class MarkovChain:
    """Discrete process on value vectors ``states`` with transition matrix T."""

    states: np.ndarray          # (n_s, dim) values attached to each state
    T: np.ndarray               # (n_s, n_s) row-stochastic
    initial_state: int = 0

    def __post_init__(self):
        self.states = np.atleast_2d(np.asarray(self.states, dtype=float))
        self.T = np.asarray(self.T, dtype=float)
        n_s = self.states.shape[0]
        if self.T.shape != (n_s, n_s):
            raise DimensionMismatch(f"transition must be {n_s}x{n_s}")
        if np.any(self.T < 0):
            raise ValueError("transition entries must be nonnegative")
        if np.abs(self.T.sum(axis=1) - 1.0).max() > 1e-12:
            raise ValueError("transition rows must sum to 1")

    @property
    def n_states(self) -> int:
        return self.states.shape[0]


ExoProcess = Union[ContinuousAR, MarkovChain]


def simulate_exo(process: ExoProcess, T: int, seed: SeedLike):
    """Simulate T periods of the exogenous process.

    For ContinuousAR returns a (T, dim) path; for MarkovChain returns
    (values (T, dim), state indices (T,)).  Reproducible given the seed.
    """
    if T < 1:
        raise ValueError("T must be >= 1")
    rng = make_rng(seed)

    if isinstance(process, ContinuousAR):
        n = process.dim
        path = np.empty((T, n))
        e = process.e0.copy()
        tv_G = process.G.ndim == 3
        tv_S = process.Sigma.ndim == 3
        chol_cache = None if tv_S else _psd_chol(process.Sigma)
        for t in range(T):
            G = process.G[t] if tv_G else process.G
            L = _psd_chol(process.Sigma[t]) if tv_S else chol_cache
            e = G @ e + L @ rng.standard_normal(n)
            path[t] = e
        return path

    if isinstance(process, MarkovChain):
        idx = np.empty(T, dtype=np.int64)
        s = process.initial_state
        cum = np.cumsum(process.T, axis=1)
        u = rng.random(T)
        for t in range(T):
            s = int(np.searchsorted(cum[s], u[t], side="right"))
            s = min(s, process.n_states - 1)
            idx[t] = s
        return process.states[idx], idx

    raise TypeError(f"unsupported process type {type(process)!r}")


def _psd_chol(sigma: np.ndarray) -> np.ndarray:
    """Cholesky-like factor of a PSD matrix (eigen fallback for singular input)."""
    try:
        return np.linalg.cholesky(sigma)
    except np.linalg.LinAlgError:
        w, v = np.linalg.eigh(0.5 * (sigma + sigma.T))
        return v * np.sqrt(np.clip(w, 0.0, None))
