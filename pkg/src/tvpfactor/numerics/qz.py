"""Generalized Schur (QZ) decomposition with stability-ordered eigenvalues.

The pencil (Gamma0, Gamma1) of a first-order system Gamma0 x_t = Gamma1 x_{t-1}
is factored as Gamma0 = Q' Lambda Z', Gamma1 = Q' Omega Z' with Q, Z unitary and
Lambda, Omega upper triangular (complex Schur form).  Rows are reordered so
that explosive generalized eigenvalues |Omega_ii / Lambda_ii| > 1 + tol occupy
the trailing block, which is the partition the rational-expectations solver
eliminates.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import linalg

from tvpfactor.exceptions import DimensionMismatch, SingularPencil

#: modulus above which a generalized eigenvalue is classified explosive
STABILITY_TOL = 1e-6

_COINCIDENT_ZERO = 1e-12


@dataclass(frozen=True)
class QzFactorization:
    """Stability-ordered QZ factorization of a regular pencil.

    Attributes
    ----------
    Q, Z : ndarray
        Unitary factors with Gamma0 = Q^H Lambda Z^H and Gamma1 = Q^H Omega Z^H
        (primes in the reconstruction identity are conjugate transposes).
    Lambda, Omega : ndarray
        Upper-triangular factors, stable block leading.
    moduli : ndarray
        Moduli of the generalized eigenvalues |Omega_ii / Lambda_ii| in the
        ordered arrangement (np.inf for roots at infinity).
    n_explosive : int
        Count of eigenvalue moduli above ``1 + stability_tol``.
    """

    Q: np.ndarray
    Z: np.ndarray
    Lambda: np.ndarray
    Omega: np.ndarray
    moduli: np.ndarray
    n_explosive: int

    @property
    def n(self) -> int:
        return self.Q.shape[0]

    def q_partition(self) -> tuple[np.ndarray, np.ndarray]:
        """(Q1, Q2): rows of Q acting on the stable / explosive blocks."""
        n_stable = self.n - self.n_explosive
        return self.Q[:n_stable], self.Q[n_stable:]


def _validate(fac: QzFactorization, g0: np.ndarray, g1: np.ndarray) -> None:
    scale0 = max(np.abs(g0).max(), 1.0)
    scale1 = max(np.abs(g1).max(), 1.0)
    r0 = np.abs(fac.Q.conj().T @ fac.Lambda @ fac.Z.conj().T - g0).max()
    r1 = np.abs(fac.Q.conj().T @ fac.Omega @ fac.Z.conj().T - g1).max()
    if r0 > 1e-9 * scale0 or r1 > 1e-9 * scale1:
        raise SingularPencil(
            f"QZ reconstruction residuals {r0:.2e}, {r1:.2e} exceed tolerance"
        )
    n = fac.n
    if np.abs(fac.Q @ fac.Q.conj().T - np.eye(n)).max() > 1e-10:
        raise SingularPencil("Q factor lost orthonormality")
    if np.abs(fac.Z @ fac.Z.conj().T - np.eye(n)).max() > 1e-10:
        raise SingularPencil("Z factor lost orthonormality")


def qz_decompose(
    gamma0: np.ndarray,
    gamma1: np.ndarray,
    stability_tol: float = STABILITY_TOL,
    check: bool | None = None,
) -> QzFactorization:
    """Stability-ordered QZ factorization of the pencil (gamma0, gamma1).

    Parameters
    ----------
    gamma0, gamma1 : ndarray
        Square matrices of equal dimension n >= 1.
    stability_tol : float
        Eigenvalues with modulus > 1 + stability_tol are explosive.
    check : bool, optional
        Verify reconstruction and orthonormality invariants; defaults to the
        interpreter debug flag.

    Raises
    ------
    DimensionMismatch
        Non-square or mismatched inputs.
    SingularPencil
        Coincident zero diagonal entries (irregular pencil) or failed
        invariant check.
    """
    g0 = np.asarray(gamma0, dtype=float)
    g1 = np.asarray(gamma1, dtype=float)
    if g0.ndim != 2 or g0.shape[0] != g0.shape[1]:
        raise DimensionMismatch(f"gamma0 must be square, got shape {g0.shape}")
    if g1.shape != g0.shape:
        raise DimensionMismatch(
            f"gamma1 shape {g1.shape} does not match gamma0 shape {g0.shape}"
        )

    cutoff = 1.0 + stability_tol

    def stable_first(alpha, beta):
        # scipy's generalized eigenvalue is alpha/beta = Lambda_ii/Omega_ii;
        # the dynamic root of the pencil is the reciprocal.
        return np.abs(beta) <= cutoff * np.abs(alpha)

    AA, BB, alpha, beta, Qs, Zs = linalg.ordqz(
        g0, g1, sort=stable_first, output="complex"
    )

    diag_a = np.abs(np.diag(AA))
    diag_b = np.abs(np.diag(BB))
    scale = max(np.abs(g0).max(), np.abs(g1).max(), 1.0)
    if np.any((diag_a < _COINCIDENT_ZERO * scale) & (diag_b < _COINCIDENT_ZERO * scale)):
        raise SingularPencil("coincident zeros on the pencil diagonals")

    with np.errstate(divide="ignore", invalid="ignore"):
        moduli = np.where(diag_a > 0, diag_b / diag_a, np.inf)
    n_explosive = int(np.sum(moduli > cutoff))

    fac = QzFactorization(
        Q=Qs.conj().T,
        Z=Zs,
        Lambda=AA,
        Omega=BB,
        moduli=moduli,
        n_explosive=n_explosive,
    )
    if check is None:
        check = __debug__
    if check:
        _validate(fac, g0, g1)
        # reordering leaves no explosive root in the leading block
        if n_explosive and np.any(moduli[: fac.n - n_explosive] > cutoff):
            raise SingularPencil("eigenvalue reordering failed")
    return fac
