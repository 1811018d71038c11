"""Dense symmetric linear algebra kernel.

Small-matrix eigenvalue extraction, definiteness tests, SPD square roots and
Schur complements. Everything here operates on plain float64 ``numpy`` arrays
and is pure: no state, no in-place mutation of caller data.
"""

from __future__ import annotations

import numpy as np

from .errors import (
    DimensionMismatch,
    NotPositiveDefinite,
    NumericalFailure,
    SingularBlock,
)

# Minimum eigenvalue for a matrix to count as (semi)definite in SPD routines.
SPD_EPS = 1e-12

# Relative asymmetry above which a matrix is rejected rather than symmetrized.
ASYM_RTOL = 1e-8

# Per-dimension default tolerance for negative-semidefiniteness verdicts,
# sized to eigensolver round-off.
NSD_TOL_PER_DIM = 1e-9


def as_matrix(m, name: str = "matrix") -> np.ndarray:
    """Validate a general real matrix: 2-D, finite entries."""
    arr = np.asarray(m, dtype=float)
    if arr.ndim != 2:
        raise DimensionMismatch(f"{name} must be 2-D, got shape {arr.shape}")
    if arr.size == 0:
        raise DimensionMismatch(f"{name} must be non-empty")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} has non-finite entries")
    return arr


def as_diag_pos(q, name: str = "q") -> np.ndarray:
    """Validate the diagonal of a positive diagonal matrix (1-D, > 0)."""
    vec = np.asarray(q, dtype=float)
    if vec.ndim != 1 or vec.size == 0:
        raise DimensionMismatch(f"{name} must be a non-empty 1-D vector")
    if not np.all(np.isfinite(vec)):
        raise ValueError(f"{name} has non-finite entries")
    if np.any(vec <= 0.0):
        raise ValueError(f"{name} must be strictly positive")
    return vec


def symmetrize(m, rtol: float = ASYM_RTOL) -> np.ndarray:
    """Return (M + M^T)/2 after checking M is square and nearly symmetric.

    Large asymmetry signals an assembly bug upstream, so inputs whose
    max |M - M^T| exceeds ``rtol * max|M|`` are rejected with ValueError.
    """
    arr = as_matrix(m)
    n, cols = arr.shape
    if n != cols:
        raise DimensionMismatch(f"expected square matrix, got {arr.shape}")
    asym = float(np.max(np.abs(arr - arr.T)))
    scale = float(np.max(np.abs(arr)))
    if asym > rtol * max(scale, 1e-300):
        raise ValueError(
            f"matrix asymmetry {asym:.3e} exceeds {rtol:.1e} * max|entry| {scale:.3e}"
        )
    return 0.5 * (arr + arr.T)


def sym_eig(m) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a symmetric matrix.

    Returns ``(w, v)`` with eigenvalues ``w`` ascending and orthonormal
    eigenvectors in the columns of ``v``, so that ``m == v @ diag(w) @ v.T``
    up to round-off.
    """
    arr = symmetrize(m)
    try:
        w, v = np.linalg.eigh(arr)
    except np.linalg.LinAlgError as exc:  # iteration cap exceeded
        raise NumericalFailure(f"symmetric eigensolver failed: {exc}") from exc
    return w, v


def eigvals_sym(m) -> np.ndarray:
    """Eigenvalues only, ascending."""
    arr = symmetrize(m)
    try:
        return np.linalg.eigvalsh(arr)
    except np.linalg.LinAlgError as exc:
        raise NumericalFailure(f"symmetric eigensolver failed: {exc}") from exc


def is_nsd(m, tol: float | None = None) -> tuple[bool, float]:
    """Negative-semidefiniteness verdict for a symmetric matrix.

    Returns ``(verdict, lambda_max)`` where ``verdict`` is
    ``lambda_max <= tol``. ``tol`` defaults to ``1e-9 * n``.
    """
    w = eigvals_sym(m)
    if tol is None:
        tol = NSD_TOL_PER_DIM * w.size
    if tol < 0:
        raise ValueError("tol must be nonnegative")
    lam_max = float(w[-1])
    return lam_max <= tol, lam_max


def is_psd(m, tol: float | None = None) -> tuple[bool, float]:
    """Positive-semidefiniteness verdict; returns ``(verdict, lambda_min)``."""
    holds, lam_max_neg = is_nsd(-symmetrize(m), tol)
    return holds, -lam_max_neg


def spd_sqrt(m, eps: float = SPD_EPS) -> np.ndarray:
    """Unique symmetric positive definite square root.

    Requires ``m`` to be symmetric with smallest eigenvalue at least ``eps``.
    """
    w, v = sym_eig(m)
    if w[0] < eps:
        raise NotPositiveDefinite(
            f"matrix has eigenvalue {w[0]:.3e} below {eps:.1e}"
        )
    root = (v * np.sqrt(w)) @ v.T
    return 0.5 * (root + root.T)


def spd_inv(m, eps: float = SPD_EPS) -> np.ndarray:
    """Inverse of a symmetric positive definite matrix via eigendecomposition."""
    w, v = sym_eig(m)
    if w[0] < eps:
        raise NotPositiveDefinite(
            f"matrix has eigenvalue {w[0]:.3e} below {eps:.1e}"
        )
    inv = (v / w) @ v.T
    return 0.5 * (inv + inv.T)


def schur_complement(m, k: int, eliminate: str = "22") -> np.ndarray:
    """Schur complement of a symmetric matrix partitioned as [[A, B], [B^T, D]].

    ``k`` is the size of the leading block A. ``eliminate="22"`` returns
    ``A - B D^{-1} B^T``; ``eliminate="11"`` returns ``D - B^T A^{-1} B``.
    Raises SingularBlock when the eliminated block has |det| below 1e-12.
    """
    arr = symmetrize(m)
    n = arr.shape[0]
    if not 0 < k < n:
        raise DimensionMismatch(f"block size {k} invalid for {n}x{n} matrix")
    a = arr[:k, :k]
    b = arr[:k, k:]
    d = arr[k:, k:]
    if eliminate == "22":
        keep, cross, gone = a, b, d
    elif eliminate == "11":
        keep, cross, gone = d, b.T, a
    else:
        raise ValueError("eliminate must be '11' or '22'")
    if abs(np.linalg.det(gone)) < SPD_EPS:
        raise SingularBlock(f"eliminated block {eliminate} is singular")
    comp = keep - cross @ np.linalg.solve(gone, cross.T)
    return 0.5 * (comp + comp.T)
