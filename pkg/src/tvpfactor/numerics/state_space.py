"""Linear-Gaussian state-space filtering, smoothing and simulation smoothing.

Model, for t = 1..T::

    x_t = c_t + T_t x_{t-1} + w_t,   w_t  ~ N(0, Q_t)      (transition)
    y_t = d_t + Z_t x_t     + v_t,   v_t  ~ N(0, H_t)      (measurement)

with x_1 ~ N(a1, P1) *prior to* observing y_1 (the transition into t = 1 is
folded into the prior).  System matrices may be constant (stored once and
broadcast) or carry a leading time dimension.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from tvpfactor.exceptions import DimensionMismatch, NonPsdCovariance
from tvpfactor.random import draw_multivariate_normal

_PSD_TOL = 1e-10

#: covariance scale used for the approximate diffuse prior; 1e9 keeps the
#: shrinkage bias of the approximate-diffuse mean below 1e-8 on unit-scale data
DIFFUSE_SCALE = 1e9


def _as_time_indexed(arr: np.ndarray, base_ndim: int) -> tuple[np.ndarray, bool]:
    """Return (array, broadcast) where broadcast means no time dimension."""
    arr = np.asarray(arr, dtype=float)
    if arr.ndim == base_ndim:
        return arr, True
    if arr.ndim == base_ndim + 1:
        return arr, False
    raise DimensionMismatch(f"array with ndim {arr.ndim}, expected {base_ndim} or {base_ndim + 1}")


def _check_psd(mat: np.ndarray, name: str) -> None:
    if np.abs(mat - mat.T).max() > _PSD_TOL * max(1.0, np.abs(mat).max()):
        raise NonPsdCovariance(f"{name} is not symmetric")
    w = np.linalg.eigvalsh(0.5 * (mat + mat.T))
    if w.min() < -_PSD_TOL * max(1.0, w.max(), 1.0):
        raise NonPsdCovariance(f"{name} has eigenvalue {w.min():.3e} < 0")


@dataclass
class StateSpaceModel:
    """Carrier for the per-period (or broadcast) system matrices.

    Any of ``transition``, ``transition_intercept``, ``transition_cov``,
    ``measurement``, ``measurement_intercept``, ``measurement_cov`` may be
    given with or without a leading time dimension of length ``nobs``.
    """

    transition: np.ndarray
    transition_cov: np.ndarray
    measurement: np.ndarray
    measurement_cov: np.ndarray
    initial_mean: np.ndarray
    initial_cov: np.ndarray
    transition_intercept: np.ndarray | None = None
    measurement_intercept: np.ndarray | None = None
    nobs: int | None = None

    n_states: int = field(init=False)
    n_obs: int = field(init=False)

    def __post_init__(self):
        self._T, self._T_bcast = _as_time_indexed(self.transition, 2)
        self._Q, self._Q_bcast = _as_time_indexed(self.transition_cov, 2)
        self._Z, self._Z_bcast = _as_time_indexed(self.measurement, 2)
        self._H, self._H_bcast = _as_time_indexed(self.measurement_cov, 2)

        self.n_states = self._T.shape[-1]
        self.n_obs = self._Z.shape[-2]

        if self.transition_intercept is None:
            self.transition_intercept = np.zeros(self.n_states)
        if self.measurement_intercept is None:
            self.measurement_intercept = np.zeros(self.n_obs)
        self._c, self._c_bcast = _as_time_indexed(self.transition_intercept, 1)
        self._d, self._d_bcast = _as_time_indexed(self.measurement_intercept, 1)

        self.initial_mean = np.asarray(self.initial_mean, dtype=float)
        self.initial_cov = np.asarray(self.initial_cov, dtype=float)

        lengths = {
            a.shape[0]
            for a, b in [
                (self._T, self._T_bcast),
                (self._Q, self._Q_bcast),
                (self._Z, self._Z_bcast),
                (self._H, self._H_bcast),
                (self._c, self._c_bcast),
                (self._d, self._d_bcast),
            ]
            if not b
        }
        if self.nobs is None:
            if len(lengths) > 1:
                raise DimensionMismatch(f"inconsistent time dimensions {lengths}")
            self.nobs = lengths.pop() if lengths else None
        elif lengths and lengths != {self.nobs}:
            raise DimensionMismatch(f"time dimensions {lengths} != nobs {self.nobs}")

        s, k = self.n_states, self.n_obs
        if self._T.shape[-2:] != (s, s):
            raise DimensionMismatch("transition must be square")
        if self._Q.shape[-2:] != (s, s):
            raise DimensionMismatch("transition_cov shape mismatch")
        if self._Z.shape[-2:] != (k, s):
            raise DimensionMismatch("measurement shape mismatch")
        if self._H.shape[-2:] != (k, k):
            raise DimensionMismatch("measurement_cov shape mismatch")
        if self.initial_mean.shape != (s,) or self.initial_cov.shape != (s, s):
            raise DimensionMismatch("initial moments shape mismatch")

        _check_psd(self.initial_cov, "initial_cov")
        for arr, bcast, name in [
            (self._Q, self._Q_bcast, "transition_cov"),
            (self._H, self._H_bcast, "measurement_cov"),
        ]:
            if bcast:
                _check_psd(arr, name)
            else:
                for t in (0, arr.shape[0] - 1):  # endpoints; full scan is O(T n^3)
                    _check_psd(arr[t], f"{name}[{t}]")

    # per-period accessors -------------------------------------------------
    def T_at(self, t: int) -> np.ndarray:
        return self._T if self._T_bcast else self._T[t]

    def Q_at(self, t: int) -> np.ndarray:
        return self._Q if self._Q_bcast else self._Q[t]

    def Z_at(self, t: int) -> np.ndarray:
        return self._Z if self._Z_bcast else self._Z[t]

    def H_at(self, t: int) -> np.ndarray:
        return self._H if self._H_bcast else self._H[t]

    def c_at(self, t: int) -> np.ndarray:
        return self._c if self._c_bcast else self._c[t]

    def d_at(self, t: int) -> np.ndarray:
        return self._d if self._d_bcast else self._d[t]


@dataclass
class SmootherOutput:
    filtered_means: np.ndarray      # (T, s) posterior means given y_{1:t}
    filtered_covs: np.ndarray       # (T, s, s)
    smoothed_means: np.ndarray      # (T, s) posterior means given y_{1:T}
    smoothed_covs: np.ndarray       # (T, s, s)
    loglik: float
    predicted_means: np.ndarray     # (T, s) one-step-ahead state means
    predicted_covs: np.ndarray      # (T, s, s)


def _filter(model: StateSpaceModel, y: np.ndarray):
    T_len, k = y.shape
    s = model.n_states
    a_pred = np.empty((T_len, s))
    P_pred = np.empty((T_len, s, s))
    a_filt = np.empty((T_len, s))
    P_filt = np.empty((T_len, s, s))
    loglik = 0.0

    a = model.initial_mean
    P = model.initial_cov
    for t in range(T_len):
        if t > 0:
            Tt = model.T_at(t)
            a = model.c_at(t) + Tt @ a
            P = Tt @ P @ Tt.T + model.Q_at(t)
            P = 0.5 * (P + P.T)
        a_pred[t] = a
        P_pred[t] = P

        Zt = model.Z_at(t)
        v = y[t] - model.d_at(t) - Zt @ a
        F = Zt @ P @ Zt.T + model.H_at(t)
        F = 0.5 * (F + F.T)
        try:
            cf = np.linalg.cholesky(F)
        except np.linalg.LinAlgError:
            # retry with a relative jitter before declaring loss of PD
            jitter = np.eye(k) * _PSD_TOL * max(1.0, np.abs(F).max())
            try:
                cf = np.linalg.cholesky(F + jitter)
            except np.linalg.LinAlgError as exc:
                raise NonPsdCovariance(f"innovation covariance not PD at t={t}") from exc
        Finv_v = np.linalg.solve(cf.T, np.linalg.solve(cf, v))
        K = P @ Zt.T @ np.linalg.solve(cf.T, np.linalg.solve(cf, np.eye(k)))
        a = a + K @ v
        # Joseph form: immune to the cancellation a plain (I-KZ)P update
        # suffers under near-diffuse priors
        IKZ = np.eye(s) - K @ Zt
        P = IKZ @ P @ IKZ.T + K @ model.H_at(t) @ K.T
        P = 0.5 * (P + P.T)
        a_filt[t] = a
        P_filt[t] = P
        loglik += -0.5 * (
            k * np.log(2.0 * np.pi) + 2.0 * np.sum(np.log(np.diag(cf))) + v @ Finv_v
        )
    return a_pred, P_pred, a_filt, P_filt, loglik


def kalman_smooth(model: StateSpaceModel, observations: np.ndarray) -> SmootherOutput:
    """Kalman filter plus Rauch-Tung-Striebel smoother with exact log-likelihood.

    Parameters
    ----------
    model : StateSpaceModel
    observations : ndarray, shape (T, k)

    Raises
    ------
    NonPsdCovariance
        If an innovation covariance loses positive definiteness.
    """
    y = np.atleast_2d(np.asarray(observations, dtype=float))
    if y.ndim != 2 or y.shape[1] != model.n_obs:
        raise DimensionMismatch(f"observations shape {y.shape} incompatible with k={model.n_obs}")
    if model.nobs is not None and y.shape[0] != model.nobs:
        raise DimensionMismatch(f"{y.shape[0]} observations but model.nobs={model.nobs}")
    if not np.all(np.isfinite(y)):
        raise ValueError("observations must be finite")

    a_pred, P_pred, a_filt, P_filt, loglik = _filter(model, y)
    T_len, s = a_filt.shape

    a_sm = np.empty_like(a_filt)
    P_sm = np.empty_like(P_filt)
    a_sm[-1] = a_filt[-1]
    P_sm[-1] = P_filt[-1]
    for t in range(T_len - 2, -1, -1):
        Tn = model.T_at(t + 1)
        J = P_filt[t] @ Tn.T @ np.linalg.pinv(P_pred[t + 1], hermitian=True)
        a_sm[t] = a_filt[t] + J @ (a_sm[t + 1] - a_pred[t + 1])
        P = P_filt[t] + J @ (P_sm[t + 1] - P_pred[t + 1]) @ J.T
        P_sm[t] = 0.5 * (P + P.T)

    return SmootherOutput(
        filtered_means=a_filt,
        filtered_covs=P_filt,
        smoothed_means=a_sm,
        smoothed_covs=P_sm,
        loglik=float(loglik),
        predicted_means=a_pred,
        predicted_covs=P_pred,
    )


def simulation_smoother(
    model: StateSpaceModel, observations: np.ndarray, rng: np.random.Generator
) -> np.ndarray:
    """One draw of the state path from its joint smoothing distribution.

    Carter-Kohn backward sampling: filter forward, draw x_T from the filtered
    posterior, then draw x_t | x_{t+1}, y_{1:t} backwards.  Degenerate
    conditionals (zero covariance directions) are handled exactly, so a model
    with no state noise yields the smoothed mean path on every draw.
    """
    y = np.atleast_2d(np.asarray(observations, dtype=float))
    a_pred, P_pred, a_filt, P_filt, _ = _filter(model, y)
    T_len, s = a_filt.shape

    draw = np.empty((T_len, s))
    draw[-1] = draw_multivariate_normal(rng, a_filt[-1], P_filt[-1])
    for t in range(T_len - 2, -1, -1):
        Tn = model.T_at(t + 1)
        J = P_filt[t] @ Tn.T @ np.linalg.pinv(P_pred[t + 1], hermitian=True)
        mean = a_filt[t] + J @ (draw[t + 1] - a_pred[t + 1])
        cov = P_filt[t] - J @ P_pred[t + 1] @ J.T
        draw[t] = draw_multivariate_normal(rng, mean, cov)
    return draw


def simulation_smoother_many(
    model: StateSpaceModel,
    observations: np.ndarray,
    rng: np.random.Generator,
    n_draws: int,
) -> np.ndarray:
    """``n_draws`` independent smoothing draws, (n_draws, T, s).

    Filters once and vectorizes the backward pass across draws; one call with
    n_draws=N is equivalent in distribution to N calls of
    :func:`simulation_smoother`.
    """
    y = np.atleast_2d(np.asarray(observations, dtype=float))
    a_pred, P_pred, a_filt, P_filt, _ = _filter(model, y)
    T_len, s = a_filt.shape

    def sqrt_psd(cov):
        w, v = np.linalg.eigh(0.5 * (cov + cov.T))
        return v * np.sqrt(np.clip(w, 0.0, None))

    draws = np.empty((n_draws, T_len, s))
    draws[:, -1, :] = a_filt[-1] + rng.standard_normal((n_draws, s)) @ sqrt_psd(P_filt[-1]).T
    for t in range(T_len - 2, -1, -1):
        Tn = model.T_at(t + 1)
        J = P_filt[t] @ Tn.T @ np.linalg.pinv(P_pred[t + 1], hermitian=True)
        mean = a_filt[t] + (draws[:, t + 1, :] - a_pred[t + 1]) @ J.T
        cov = P_filt[t] - J @ P_pred[t + 1] @ J.T
        draws[:, t, :] = mean + rng.standard_normal((n_draws, s)) @ sqrt_psd(cov).T
    return draws


def diffuse_initial(n_states: int, scale: float = DIFFUSE_SCALE):
    """Approximate diffuse prior: zero mean, ``scale``-times-identity covariance."""
    return np.zeros(n_states), np.eye(n_states) * scale
