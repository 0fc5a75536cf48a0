"""Small dense complex-matrix kernel.

Hermitian eigendecomposition, PSD square root, and the 2x2 determinant
square root whose super-additivity drives the monogamy inequalities.
All functions are pure and operate on plain complex ndarrays.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NotHermitianError, NotPSDError, NotSquareError, WrongShapeError

# Eigenvalues in [-PSD_CLAMP_TOL, 0) are round-off from partial traces and
# are treated as exact zeros by the PSD-gated operations.
PSD_CLAMP_TOL = 1e-10


@dataclass(frozen=True)
class HermitianEigenResult:
    """Eigenvalues in ascending order; eigenvectors as matrix columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def as_complex_matrix(m) -> np.ndarray:
    """Coerce to a finite 2-D complex ndarray."""
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2:
        raise WrongShapeError(f"expected a matrix, got ndim={a.ndim}")
    if not np.all(np.isfinite(a.view(float))):
        raise WrongShapeError("matrix has non-finite entries")
    return a


def hermiticity_defect(m: np.ndarray) -> float:
    """Max-norm distance from the Hermitian part, ``max |M - M^dagger|``."""
    return float(np.max(np.abs(m - m.conj().T))) if m.size else 0.0


def hermitian_eig(m, tol: float = 1e-10) -> HermitianEigenResult:
    """Eigendecomposition of a Hermitian matrix.

    Parameters
    ----------
    m : array_like
        Square complex matrix, Hermitian within `tol` in max norm.
    tol : float
        Allowed ``max |M - M^dagger|`` before the input is rejected.

    Returns
    -------
    HermitianEigenResult
        Ascending eigenvalues and orthonormal eigenvector columns, so that
        ``V @ diag(w) @ V^dagger`` reconstructs the Hermitian part of `m`.

    Raises
    ------
    NotSquareError, NotHermitianError
    """
    a = as_complex_matrix(m)
    if a.shape[0] != a.shape[1]:
        raise NotSquareError(f"matrix is {a.shape[0]}x{a.shape[1]}")
    defect = hermiticity_defect(a)
    if defect > tol:
        raise NotHermitianError(f"symmetry defect {defect:.3e} exceeds tol {tol:.3e}")
    w, v = np.linalg.eigh((a + a.conj().T) / 2)
    return HermitianEigenResult(eigenvalues=w, eigenvectors=v)


def psd_sqrt(m, tol: float = 1e-10) -> np.ndarray:
    """Hermitian square root of a PSD matrix.

    Eigenvalues in ``[-PSD_CLAMP_TOL, 0)`` are clamped to zero; anything
    below that raises NotPSDError.
    """
    eig = hermitian_eig(m, tol=tol)
    w = eig.eigenvalues
    if w[0] < -PSD_CLAMP_TOL:
        raise NotPSDError(f"minimum eigenvalue {w[0]:.3e} below -{PSD_CLAMP_TOL:.0e}")
    w = np.sqrt(np.clip(w, 0.0, None))
    v = eig.eigenvectors
    r = (v * w) @ v.conj().T
    return (r + r.conj().T) / 2


def sqrt_det2(m) -> float:
    """``sqrt(det M)`` for a 2x2 Hermitian PSD matrix, clamped at zero.

    The determinant is evaluated in closed form, ``a*d - |b|^2`` for
    ``[[a, b], [b*, d]]``.  Twice this value is the concurrence of any
    2xd pure state whose qubit marginal is M (scaled by its weight).
    """
    a = as_complex_matrix(m)
    if a.shape != (2, 2):
        raise WrongShapeError(f"expected 2x2, got {a.shape[0]}x{a.shape[1]}")
    if hermiticity_defect(a) > 1e-8:
        raise NotPSDError("matrix is not Hermitian")
    p, q = a[0, 0].real, a[1, 1].real
    # eigenvalues of [[p, b], [b*, q]]: mean +- sqrt(gap^2/4 + |b|^2)
    half_span = np.sqrt(0.25 * (p - q) ** 2 + abs(a[0, 1]) ** 2)
    if 0.5 * (p + q) - half_span < -PSD_CLAMP_TOL:
        raise NotPSDError("matrix has a negative eigenvalue")
    det = p * q - abs(a[0, 1]) ** 2
    return float(np.sqrt(max(0.0, det)))
