"""Dense linear-algebra kernel for small matrices (m up to ~20, n up to ~8).

All routines are pure functions of their arguments.  Matrices are plain
2-D numpy arrays of floats; vectors are 1-D arrays.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    NotSymmetricError,
    ShapeError,
    SingularMatrixError,
    ZeroMatrixError,
)


@dataclass(frozen=True)
class Tolerances:
    """Numerical thresholds used throughout the package.

    rank_rtol    relative singularity threshold (against the global largest
                 singular value, so subset classification is scale stable)
    nonneg_atol  slack for entrywise nonnegativity of eigenvectors
    feas_tol     strict-feasibility threshold
    verify_rtol  relative tolerance for identity checks
    """

    rank_rtol: float = 1e-10
    nonneg_atol: float = 1e-9
    feas_tol: float = 1e-8
    verify_rtol: float = 1e-7

    def __post_init__(self):
        for name in ("rank_rtol", "nonneg_atol", "feas_tol", "verify_rtol"):
            value = getattr(self, name)
            if not (0.0 < value < 1e-2):
                raise ValueError(f"{name} must lie in (0, 1e-2), got {value!r}")


DEFAULT_TOL = Tolerances()


def as_matrix(a) -> np.ndarray:
    """Validate and convert input to a 2-D float array with finite entries."""
    arr = np.asarray(a, dtype=float)
    if arr.ndim != 2:
        raise ShapeError(f"expected a 2-D matrix, got ndim={arr.ndim}")
    m, n = arr.shape
    if m < 1 or n < 1:
        raise ShapeError(f"matrix dimensions must be >= 1, got {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ShapeError("matrix entries must be finite (no NaN/Inf)")
    return arr


def as_vector(v, length: int | None = None) -> np.ndarray:
    arr = np.asarray(v, dtype=float)
    if arr.ndim != 1:
        raise ShapeError(f"expected a 1-D vector, got ndim={arr.ndim}")
    if length is not None and arr.shape[0] != length:
        raise ShapeError(f"expected vector of length {length}, got {arr.shape[0]}")
    if not np.all(np.isfinite(arr)):
        raise ShapeError("vector entries must be finite (no NaN/Inf)")
    return arr


def sigma_extremes(a) -> tuple[float, float]:
    """Smallest and largest singular values, via the smaller Gram matrix."""
    arr = as_matrix(a)
    m, n = arr.shape
    gram = arr.T @ arr if n <= m else arr @ arr.T
    w = np.linalg.eigvalsh(gram)
    w = np.clip(w, 0.0, None)
    return math.sqrt(w[0]), math.sqrt(w[-1])


def operator_norm(a) -> float:
    """The l2 -> l2 operator norm, i.e. the largest singular value."""
    return sigma_extremes(a)[1]


def _canonical_sign(vecs: np.ndarray) -> np.ndarray:
    """Flip column signs so the largest-magnitude entry of each is positive."""
    out = vecs.copy()
    for j in range(out.shape[1]):
        col = out[:, j]
        k = int(np.argmax(np.abs(col)))
        if col[k] < 0:
            out[:, j] = -col
    return out


def sym_eig(g) -> list[tuple[float, np.ndarray]]:
    """Full spectral decomposition of a symmetric matrix.

    Returns (eigenvalue, unit eigenvector) pairs with eigenvalues in
    descending order.  Eigenvector signs are canonicalized so identical
    inputs give identical outputs.
    """
    arr = as_matrix(g)
    m, n = arr.shape
    if m != n:
        raise ShapeError(f"expected a square matrix, got {arr.shape}")
    scale = float(np.max(np.abs(arr))) or 1.0
    if np.max(np.abs(arr - arr.T)) > 1e-12 * scale:
        raise NotSymmetricError("matrix is not symmetric within 1e-12 relative")
    w, v = np.linalg.eigh(arr)
    v = _canonical_sign(v)
    return [(float(w[i]), v[:, i].copy()) for i in range(n - 1, -1, -1)]


def qr_orthonormal(a, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """Orthonormal basis of range(a) as an m x r matrix, r = rank(a)."""
    arr = as_matrix(a)
    u, s, _ = np.linalg.svd(arr, full_matrices=False)
    if s[0] == 0.0:
        raise ZeroMatrixError("cannot orthonormalize the zero matrix")
    r = int(np.sum(s > tol.rank_rtol * s[0]))
    return _canonical_sign(u[:, :r])


def solve_square(a, b, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """Solve Ax = b for square A; rejects singular-within-tolerance input."""
    arr = as_matrix(a)
    m, n = arr.shape
    if m != n:
        raise ShapeError(f"expected a square matrix, got {arr.shape}")
    rhs = as_vector(b, m)
    smin, smax = sigma_extremes(arr)
    if smin <= tol.rank_rtol * smax:
        raise SingularMatrixError(
            f"matrix is singular within tolerance (smin={smin:.3e}, smax={smax:.3e})"
        )
    return np.linalg.solve(arr, rhs)


def rank_of(a, tol: Tolerances = DEFAULT_TOL) -> int:
    """Number of singular values above rank_rtol times the largest."""
    arr = as_matrix(a)
    s = np.linalg.svd(arr, compute_uv=False)
    if s[0] == 0.0:
        return 0
    return int(np.sum(s > tol.rank_rtol * s[0]))
