"""Small dense matrix services: Hurwitz test, Lyapunov solve, Sigma-norm geometry."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._validation import check_square, check_symmetric
from .exceptions import DefinitenessError, NumericalError, StabilityError

HURWITZ_MARGIN = 1e-12
LYAPUNOV_RTOL = 1e-10


@dataclass(frozen=True)
class SpectralSummary:
    lambda_bar: float
    lambda_min: float
    lambda_max: float

    @property
    def rho(self) -> float:
        return self.lambda_max / self.lambda_min

    def as_tuple(self):
        return (self.lambda_bar, self.lambda_min, self.lambda_max, self.rho)


@dataclass(frozen=True)
class GeometrySolution:
    """Solution of ``A S + S A^T + sigma2 = 0`` with the derived Sigma-norm data.

    Attributes
    ----------
    A, sigma2 : ndarray (d, d)
        Inputs of the Lyapunov equation.
    Sigma : ndarray (d, d)
        Symmetric positive definite solution.
    SigmaInv, SigmaInvSqrt : ndarray (d, d)
        Inverse and symmetric inverse square root of ``Sigma``.
    sigma2_Sigma : ndarray (d, d)
        ``SigmaInvSqrt @ sigma2 @ SigmaInvSqrt``.
    alpha1 : float
        Half the smallest eigenvalue of ``sigma2_Sigma``.
    residual : float
        ``max |A Sigma + Sigma A^T + sigma2|`` of the returned ``Sigma``.
    """

    A: np.ndarray
    sigma2: np.ndarray
    Sigma: np.ndarray
    SigmaInv: np.ndarray
    SigmaInvSqrt: np.ndarray
    sigma2_Sigma: np.ndarray
    alpha1: float
    residual: float

    @property
    def d(self) -> int:
        return self.Sigma.shape[0]

    def norm(self, y) -> float:
        return sigma_norm(self, y)


def check_hurwitz(A) -> bool:
    """True iff every eigenvalue of ``A`` has real part below ``-1e-12``."""
    A = check_square(A, "A")
    return bool(np.max(np.linalg.eigvals(A).real) < -HURWITZ_MARGIN)


def spectral_summary(M) -> SpectralSummary:
    M = check_symmetric(M, "M")
    w = np.linalg.eigvalsh(M)
    if w[0] <= 0:
        raise DefinitenessError(f"matrix is not positive definite (lambda_min={w[0]:.3g})")
    return SpectralSummary(float(np.trace(M)) / M.shape[0], float(w[0]), float(w[-1]))


def _sym_inv_sqrt(M):
    w, V = np.linalg.eigh(M)
    return (V / np.sqrt(w)) @ V.T


def solve_lyapunov(A, sigma2) -> GeometrySolution:
    """Solve ``A Sigma + Sigma A^T + sigma2 = 0`` by Kronecker linearization.

    The ``d^2`` unknowns are found with a dense LU solve, which is exact
    enough at the dimensions this package targets (d <= 4).
    """
    A = check_square(A, "A")
    sigma2 = check_symmetric(sigma2, "sigma2")
    if A.shape != sigma2.shape:
        raise ValueError(f"shape mismatch: A {A.shape} vs sigma2 {sigma2.shape}")
    if not check_hurwitz(A):
        raise StabilityError("A is not Hurwitz; the Lyapunov equation has no pd solution")
    spectral_summary(sigma2)  # raises if sigma2 is not pd

    d = A.shape[0]
    eye = np.eye(d)
    # row-major vec: vec(A S) = (A kron I) vec(S), vec(S A^T) = (I kron A) vec(S)
    K = np.kron(A, eye) + np.kron(eye, A)
    Sigma = np.linalg.solve(K, -sigma2.reshape(-1)).reshape(d, d)
    Sigma = 0.5 * (Sigma + Sigma.T)

    scale = np.max(np.abs(sigma2))
    residual = float(np.max(np.abs(A @ Sigma + Sigma @ A.T + sigma2)))
    if residual > LYAPUNOV_RTOL * scale:
        raise NumericalError(f"Lyapunov residual {residual:.3g} exceeds tolerance")

    SigmaInv = np.linalg.inv(Sigma)
    SigmaInv = 0.5 * (SigmaInv + SigmaInv.T)
    SigmaInvSqrt = _sym_inv_sqrt(Sigma)
    s2S = SigmaInvSqrt @ sigma2 @ SigmaInvSqrt
    s2S = 0.5 * (s2S + s2S.T)
    alpha1 = 0.5 * float(np.linalg.eigvalsh(s2S)[0])
    if alpha1 <= 0:
        raise NumericalError("sigma2_Sigma is not positive definite")
    return GeometrySolution(A, sigma2, Sigma, SigmaInv, SigmaInvSqrt, s2S, alpha1, residual)


def sigma_norm(geom: GeometrySolution, y) -> float:
    """``sqrt(y^T Sigma^{-1} y)``."""
    y = np.asarray(y, dtype=float)
    if y.shape != (geom.d,):
        raise ValueError(f"expected a vector of length {geom.d}, got shape {y.shape}")
    return float(np.sqrt(max(y @ geom.SigmaInv @ y, 0.0)))


def sigma_norm_sq_rows(SigmaInv, Y):
    """Squared Sigma-norms of the rows of ``Y`` (vectorized)."""
    Y = np.asarray(Y, dtype=float)
    return np.einsum("...i,ij,...j->...", Y, SigmaInv, Y)
