"""
Dense complex linear algebra used throughout the package.

All routines take and return plain ``numpy.ndarray`` objects. Spectra are
always sorted in descending order so that "the k-th coefficient" has a
single meaning everywhere.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import ConvergenceFailure, DimensionMismatch, NotHermitian, NotPSD

ATOL = 1e-10
RTOL = 1e-8
RANK_TOL = 1e-10


@dataclass(frozen=True)
class HermitianSpectrum:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T


@dataclass(frozen=True)
class SingularSpectrum:
    singular_values: np.ndarray
    left_vectors: np.ndarray
    right_vectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        return (self.left_vectors * self.singular_values) @ self.right_vectors.conj().T


def as_matrix(m) -> np.ndarray:
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2:
        raise DimensionMismatch(f"expected a 2-d matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite entries")
    return a


def frobenius_norm(m: np.ndarray) -> float:
    return float(np.linalg.norm(m))


def is_close(a, b, atol: float = ATOL, rtol: float = RTOL) -> bool:
    """Scalar or elementwise closeness, ``|a - b| <= atol + rtol * |b|``."""
    return bool(np.all(np.abs(np.asarray(a) - np.asarray(b)) <= atol + rtol * np.abs(b)))


def hermitian_eig(m, tol: float = ATOL) -> HermitianSpectrum:
    """Eigendecomposition of a Hermitian matrix, eigenvalues descending.

    The input is symmetrized as ``(M + M^dagger) / 2`` first, so asymmetry at
    the level of rounding noise is harmless.

    Raises
    ------
    DimensionMismatch
        If ``m`` is not square.
    NotHermitian
        If ``||M - M^dagger||_F > tol * max(1, ||M||_F)``.
    """
    a = as_matrix(m)
    if a.shape[0] != a.shape[1]:
        raise DimensionMismatch(f"hermitian_eig needs a square matrix, got {a.shape}")
    skew = frobenius_norm(a - a.conj().T)
    if skew > tol * max(1.0, frobenius_norm(a)):
        raise NotHermitian(f"matrix is not hermitian (||M - M^H||_F = {skew:.3e})")
    w, v = np.linalg.eigh((a + a.conj().T) / 2)
    return HermitianSpectrum(w[::-1].copy(), v[:, ::-1].copy())


def svd(m) -> SingularSpectrum:
    """Thin singular value decomposition ``M = U diag(s) V^dagger``.

    ``left_vectors`` is ``U`` and ``right_vectors`` is ``V`` (not ``V^dagger``).
    LAPACK's divide-and-conquer driver is tried first; if it does not converge
    the slower QR-iteration driver is used before giving up.
    """
    a = as_matrix(m)
    for driver in ("gesdd", "gesvd"):
        try:
            u, s, vh = scipy.linalg.svd(a, full_matrices=False, lapack_driver=driver)
        except np.linalg.LinAlgError:
            continue
        return SingularSpectrum(s, u, vh.conj().T)
    raise ConvergenceFailure(f"SVD did not converge for a {a.shape} matrix")


def _psd_spectrum(m, rank_tol: float) -> tuple[HermitianSpectrum, np.ndarray]:
    spec = hermitian_eig(m)
    w = spec.eigenvalues
    lam_max = max(float(w[0]), 0.0)
    if w[-1] < -rank_tol * max(lam_max, 1.0):
        raise NotPSD(f"matrix has a negative eigenvalue {w[-1]:.3e}")
    keep = w > rank_tol * lam_max
    return spec, keep


def psd_inverse_sqrt(m, rank_tol: float = RANK_TOL) -> np.ndarray:
    """Inverse square root of a PSD matrix, taken on its support.

    Eigenvalues at or below ``rank_tol * lambda_max`` are treated as exact
    zeros and contribute nothing, so ``S M S`` is the support projector.
    """
    spec, keep = _psd_spectrum(m, rank_tol)
    v = spec.eigenvectors[:, keep]
    return (v * spec.eigenvalues[keep] ** -0.5) @ v.conj().T


def psd_sqrt(m, rank_tol: float = RANK_TOL) -> np.ndarray:
    spec, keep = _psd_spectrum(m, rank_tol)
    v = spec.eigenvectors[:, keep]
    return (v * np.sqrt(spec.eigenvalues[keep])) @ v.conj().T


def support_projector(m, rank_tol: float = RANK_TOL) -> np.ndarray:
    spec, keep = _psd_spectrum(m, rank_tol)
    v = spec.eigenvectors[:, keep]
    return v @ v.conj().T


def frobenius_inner(m, n) -> complex:
    """Hilbert-Schmidt inner product ``tr(M^dagger N)``."""
    a, b = as_matrix(m), as_matrix(n)
    if a.shape != b.shape:
        raise DimensionMismatch(f"shapes differ: {a.shape} vs {b.shape}")
    return complex(np.vdot(a, b))


def trace_norm(m) -> float:
    return float(np.sum(svd(m).singular_values))
