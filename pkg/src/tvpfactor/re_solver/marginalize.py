"""Subvector VARMA representations of VAR(1) processes.

Block elimination by polynomial arithmetic: writing A(L) = I - Phi1 L and
partitioning by kept/dropped variables, the kept subvector satisfies

    [det(A22(L)) A11(L) - A12(L) adj(A22(L)) A21(L)] x1_t
        = const + [det(A22(L)) P1 - A12(L) adj(A22(L)) P2] eps_t

with P = PhiEps partitioned by rows.  Degrees are bounded by n-k+1 (AR) and
n-k (MA).  The moving-average part, expressed in the structural shocks eps,
is converted to an innovations representation (Theta, Sigma_u) by the
steady-state filter of its finite state space (a spectral factorization).

The time-varying variant applies the same elimination pointwise per period
with the period-t coefficient matrices (the slowly-varying construction);
near-singular A22 lag polynomials are surfaced as warnings.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from tvpfactor.exceptions import BlockSingular, UnstableInput

_TRIM_TOL = 1e-12
_DET_BOUND = 1e-8


# ---------------------------------------------------------------- polynomials
def poly_mul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Product of matrix polynomials, shapes (da+1, r, m) x (db+1, m, c)."""
    da, db = a.shape[0] - 1, b.shape[0] - 1
    out = np.zeros((da + db + 1, a.shape[1], b.shape[2]))
    for i in range(da + 1):
        for j in range(db + 1):
            out[i + j] += a[i] @ b[j]
    return out


def poly_scale(mat: np.ndarray, scalar: np.ndarray) -> np.ndarray:
    """Scalar polynomial (ds+1,) times matrix polynomial (dm+1, r, c)."""
    ds, dm = scalar.shape[0] - 1, mat.shape[0] - 1
    out = np.zeros((ds + dm + 1,) + mat.shape[1:])
    for i in range(ds + 1):
        for j in range(dm + 1):
            out[i + j] += scalar[i] * mat[j]
    return out


def poly_det(p: np.ndarray) -> np.ndarray:
    """Determinant of a matrix polynomial by cofactor expansion, shape (deg+1,)."""
    m = p.shape[1]
    if m == 0:
        return np.array([1.0])
    if m == 1:
        return p[:, 0, 0].copy()
    total = np.zeros(p.shape[0] * m - m + 1)
    for j in range(m):
        minor = np.delete(np.delete(p, 0, axis=1), j, axis=2)
        sub = poly_det(minor)
        term = np.convolve(p[:, 0, j], sub) * ((-1.0) ** j)
        total[: term.shape[0]] += term
    return total


def poly_adj(p: np.ndarray) -> np.ndarray:
    """Adjugate of a matrix polynomial: adj[i, j] = (-1)^(i+j) det(minor_ji)."""
    m = p.shape[1]
    if m == 0:
        return np.ones((1, 0, 0))
    if m == 1:
        return np.ones((1, 1, 1))
    deg = (p.shape[0] - 1) * (m - 1)
    out = np.zeros((deg + 1, m, m))
    for i in range(m):
        for j in range(m):
            minor = np.delete(np.delete(p, j, axis=1), i, axis=2)
            sub = poly_det(minor) * ((-1.0) ** (i + j))
            out[: sub.shape[0], i, j] = sub
    return out


def poly_trim(p: np.ndarray, tol: float = _TRIM_TOL) -> np.ndarray:
    scale = max(np.abs(p).max(), 1.0)
    last = p.shape[0]
    while last > 1 and np.abs(p[last - 1]).max() <= tol * scale:
        last -= 1
    return p[:last]


def _det_min_modulus(det_coeffs: np.ndarray, n_grid: int = 256) -> float:
    z = np.exp(1j * np.linspace(0.0, 2 * np.pi, n_grid, endpoint=False))
    vals = np.polyval(det_coeffs[::-1], z)
    return float(np.abs(vals).min())


# ---------------------------------------------------------------------- model
@dataclass
class VarmaModel:
    """VARMA(p', q') for the kept subvector.

    ``phi`` are AR matrices (per lag; each (k,k) or (T,k,k) when
    time-varying), ``ma_impacts`` the MA matrices [N_0, ..., N_q'] on the
    structural shocks eps (N_0 = impact), ``theta``/``sigma`` the invertible
    innovations form x = ... + u_t + sum Theta_j u_{t-j}, u ~ WN(0, Sigma)
    (constant-parameter case only).
    """

    phi: list
    ma_impacts: list
    intercept: np.ndarray
    theta: list | None = None
    sigma: np.ndarray | None = None

    @property
    def p(self) -> int:
        return len(self.phi)

    @property
    def q(self) -> int:
        return len(self.ma_impacts) - 1

    @property
    def time_varying(self) -> bool:
        return len(self.phi) > 0 and np.asarray(self.phi[0]).ndim == 3 or (
            len(self.ma_impacts) > 0 and np.asarray(self.ma_impacts[0]).ndim == 3
        )


def _eliminate(phi1: np.ndarray, phi_eps: np.ndarray, keep: np.ndarray, drop: np.ndarray):
    """One constant-coefficient block elimination; returns (P, N) polynomials."""
    A = np.stack([np.eye(phi1.shape[0]), -phi1])
    A11 = A[:, keep[:, None], keep[None, :]]
    A12 = A[:, keep[:, None], drop[None, :]]
    A21 = A[:, drop[:, None], keep[None, :]]
    A22 = A[:, drop[:, None], drop[None, :]]
    P1 = phi_eps[keep][None]
    P2 = phi_eps[drop][None]

    if np.abs(A12).max() <= _TRIM_TOL:
        # the dropped block never feeds back: the subvector is already VARMA(1,0)
        return poly_trim(A11), poly_trim(P1), np.array([1.0])

    det = poly_trim(poly_det(A22))
    adj = poly_adj(A22)
    P = poly_scale(A11, det) - poly_mul(A12, poly_mul(adj, A21))
    N = poly_scale(P1, det) - poly_mul(A12, poly_mul(adj, P2))
    return poly_trim(P), poly_trim(N), det


def _innovations_form(ma_impacts: list, max_iter: int = 1000, tol: float = 1e-14):
    """Invertible innovations representation of v_t = sum_j N_j eps_{t-j}.

    Steady-state filter of the finite-memory state space (spectral
    factorization): Theta_j = N S^{j-1} K, Sigma_u = N P N'.
    """
    N = np.stack([np.atleast_2d(m) for m in ma_impacts])
    q = N.shape[0] - 1
    k, n_eps = N.shape[1], N.shape[2]
    if q == 0:
        return [], N[0] @ N[0].T
    dim = (q + 1) * n_eps
    S = np.zeros((dim, dim))
    for j in range(q):
        S[(j + 1) * n_eps:(j + 2) * n_eps, j * n_eps:(j + 1) * n_eps] = np.eye(n_eps)
    Nbar = N.transpose(1, 0, 2).reshape(k, dim)
    Q = np.zeros((dim, dim))
    Q[:n_eps, :n_eps] = np.eye(n_eps)

    P = np.eye(dim)  # stationary covariance of the stacked shocks
    for _ in range(max_iter):
        F = Nbar @ P @ Nbar.T
        F_inv = np.linalg.pinv(F, rcond=1e-12, hermitian=True)
        PN = P @ Nbar.T
        P_new = S @ (P - PN @ F_inv @ PN.T) @ S.T + Q
        P_new = 0.5 * (P_new + P_new.T)
        if np.abs(P_new - P).max() < tol:
            P = P_new
            break
        P = P_new
    F = Nbar @ P @ Nbar.T
    K = S @ P @ Nbar.T @ np.linalg.pinv(F, rcond=1e-12, hermitian=True)
    thetas = []
    Spow = np.eye(dim)
    for j in range(1, q + 1):
        thetas.append(Nbar @ Spow @ K)
        Spow = Spow @ S
    return thetas, 0.5 * (F + F.T)


def marginalize(
    phi1: np.ndarray,
    phi_eps: np.ndarray,
    keep: list,
    phi0: np.ndarray | None = None,
) -> VarmaModel:
    """VARMA(p', q') of the kept subvector of a stable VAR(1).

    Parameters
    ----------
    phi1 : (n, n) transition
    phi_eps : (n, n_eps) impact matrix (V[eps] = I)
    keep : indices of the subvector, k of n
    phi0 : optional intercept

    Raises
    ------
    UnstableInput
        If the VAR(1) spectral radius is >= 1.
    """
    phi1 = np.asarray(phi1, dtype=float)
    phi_eps = np.atleast_2d(np.asarray(phi_eps, dtype=float))
    if phi_eps.shape[0] != phi1.shape[0]:
        phi_eps = phi_eps.reshape(phi1.shape[0], -1)
    n = phi1.shape[0]
    keep = np.asarray(keep, dtype=int)
    drop = np.array([i for i in range(n) if i not in set(keep.tolist())], dtype=int)
    k = keep.size

    radius = np.abs(np.linalg.eigvals(phi1)).max()
    if radius >= 1.0:
        raise UnstableInput(f"VAR(1) spectral radius {radius:.6f} >= 1")

    P, N, det = _eliminate(phi1, phi_eps, keep, drop)
    if _det_min_modulus(det) < _DET_BOUND:
        warnings.warn(
            f"det(A22(L)) minimum modulus {_det_min_modulus(det):.2e} near singular",
            stacklevel=2,
        )

    # normalize the lag-0 AR coefficient to the identity
    P0_inv = np.linalg.inv(P[0])
    P = np.einsum("ij,ljk->lik", P0_inv, P)
    N = np.einsum("ij,ljk->lik", P0_inv, N)
    phis = [-P[l] for l in range(1, P.shape[0])]
    ma = [N[j] for j in range(N.shape[0])]

    assert len(phis) <= n - k + 1, "AR order bound violated"
    assert len(ma) - 1 <= n - k, "MA order bound violated"

    if phi0 is None:
        intercept = np.zeros(k)
    else:
        mu = np.linalg.solve(np.eye(n) - phi1, np.asarray(phi0, dtype=float))
        intercept = mu[keep] - sum(ph @ mu[keep] for ph in phis)

    thetas, sigma = _innovations_form(ma)
    return VarmaModel(phi=phis, ma_impacts=ma, intercept=intercept, theta=thetas, sigma=sigma)


def marginalize_tvp(
    phi1: np.ndarray,
    phi_eps: np.ndarray,
    keep: list,
    phi0: np.ndarray | None = None,
) -> VarmaModel:
    """Per-period VARMA coefficients for the kept subvector of a TVP-VAR(1).

    The constant-parameter elimination is applied pointwise with the period-t
    coefficient matrices; constant inputs therefore reproduce
    :func:`marginalize` at every period.  The innovations form is not defined
    per period (theta/sigma are None); the MA part stays in impact form.

    Raises
    ------
    BlockSingular
        If det(A22,t(L)) is numerically singular at some period (its minimum
        modulus on the unit circle below 1e-8 only triggers a warning).
    """
    phi1 = np.asarray(phi1, dtype=float)
    if phi1.ndim != 3:
        raise ValueError("phi1 must be (T, n, n) for the TVP variant")
    T, n, _ = phi1.shape
    phi_eps = np.asarray(phi_eps, dtype=float)
    if phi_eps.ndim == 2:
        phi_eps = np.broadcast_to(phi_eps, (T,) + phi_eps.shape)
    keep = np.asarray(keep, dtype=int)
    drop = np.array([i for i in range(n) if i not in set(keep.tolist())], dtype=int)
    k = keep.size
    p_max = n - k + 1
    q_max = n - k

    phis = np.zeros((p_max, T, k, k))
    ma = np.zeros((q_max + 1, T, k, phi_eps.shape[-1]))
    warned = False
    for t in range(T):
        P, N, det = _eliminate(phi1[t], phi_eps[t], keep, drop)
        dmin = _det_min_modulus(det)
        if dmin == 0.0 or np.abs(det).max() <= _TRIM_TOL:
            raise BlockSingular(t, "det(A22(L)) numerically zero")
        if dmin < _DET_BOUND and not warned:
            warnings.warn(
                f"det(A22,t(L)) minimum modulus {dmin:.2e} near singular at t={t}",
                stacklevel=2,
            )
            warned = True
        P0_inv = np.linalg.inv(P[0])
        P = np.einsum("ij,ljk->lik", P0_inv, P)
        N = np.einsum("ij,ljk->lik", P0_inv, N)
        for l in range(1, P.shape[0]):
            phis[l - 1, t] = -P[l]
        for j in range(N.shape[0]):
            ma[j, t] = N[j]

    # drop identically-zero trailing lag matrices
    while phis.shape[0] > 0 and np.abs(phis[-1]).max() <= _TRIM_TOL:
        phis = phis[:-1]
    while ma.shape[0] > 1 and np.abs(ma[-1]).max() <= _TRIM_TOL:
        ma = ma[:-1]

    if phi0 is not None:
        raise NotImplementedError("per-period intercept extraction not supported")
    return VarmaModel(
        phi=[phis[l] for l in range(phis.shape[0])],
        ma_impacts=[ma[j] for j in range(ma.shape[0])],
        intercept=np.zeros(k),
        theta=None,
        sigma=None,
    )
