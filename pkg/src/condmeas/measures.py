"""The six condition measures with certificates.

chi / chibar      worst-case norm of the weighted pseudo-inverse (resp. the
                  weighted projector), computed by enumeration of non-singular
                  n x n row submatrices
hoffman / hoffmanbar  error-bound constants of Ax <= b (resp. its image-space
                  form), computed via cone-constrained eigenvalue enumeration
renegar           distance to infeasibility of Ax > 0
grassmann         subspace-based reciprocal of the same distance

The bar variants are evaluated through the orthonormal-range reduction: they
depend only on range(A), so they equal the plain measure of any orthonormal
basis of that range.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .coneig import ConeTable, SupportCertificate, cone_min
from .errors import (
    EnumerationCapError,
    NotStrictlyFeasibleError,
    RankDeficientError,
    ShapeError,
    ZeroMatrixError,
)
from .linalg import (
    DEFAULT_TOL,
    Tolerances,
    as_matrix,
    as_vector,
    operator_norm,
    qr_orthonormal,
    rank_of,
)

#: default cap on the number of n-row subsets scanned
DEFAULT_SUBSET_CAP = 100_000

#: note attached whenever the distance to infeasibility is computed
RENEGAR_CONVENTION_NOTE = (
    "convention: the distance to infeasibility is computed as "
    "min{||A^T v|| : v >= 0, ||v|| = 1}; the reciprocal-max form found in "
    "some statements of this characterization is inconsistent with the "
    "product identity H * R = 1 and is not used"
)


@dataclass
class MeasureResult:
    """A measure value together with its optimality certificate."""

    name: str
    value: float
    argmax_subset: tuple[int, ...] | None = None
    witness: np.ndarray | None = None
    degenerate: bool = False
    notes: list[str] = field(default_factory=list)
    ties: list[tuple[int, ...]] = field(default_factory=list)


def _require_full_column_rank(arr: np.ndarray, tol: Tolerances):
    if rank_of(arr, tol) < arr.shape[1]:
        raise RankDeficientError(
            f"matrix of shape {arr.shape} does not have full column rank"
        )


class SubsetScan:
    """Shared enumeration state for the n-row submatrix measures.

    One cone table over the full Gram A A^T (supports up to size n) serves
    every subset J: the Gram of the submatrix A_J is a principal submatrix of
    the full Gram, so its eigensystems are table entries.  Using a single
    table keeps the submatrix-based measures and the signed scans bitwise
    consistent with each other.
    """

    def __init__(
        self,
        a,
        tol: Tolerances = DEFAULT_TOL,
        seed: int = 0,
        subset_cap: int | None = None,
    ):
        arr = as_matrix(a)
        _require_full_column_rank(arr, tol)
        m, n = arr.shape
        if subset_cap is None:
            subset_cap = DEFAULT_SUBSET_CAP
        if math.comb(m, n) > subset_cap:
            raise EnumerationCapError(
                f"C({m},{n}) = {math.comb(m, n)} subsets exceeds the cap {subset_cap}"
            )
        self.a = arr
        self.m, self.n = m, n
        self.tol = tol
        self.sigma_max = operator_norm(arr)
        self.gram = arr @ arr.T
        self.table = ConeTable(self.gram, tol, max_support_size=n, seed=seed)
        self.subsets = list(combinations(range(m), n))
        # smallest eigenvalue (and eigenvector) of each n x n submatrix Gram
        self.lam_min: dict[tuple[int, ...], float] = {}
        self.vec_min: dict[tuple[int, ...], np.ndarray] = {}
        for J in self.subsets:
            lam, basis = self.table.eigensystems[self.table.index[J]][-1]
            self.lam_min[J] = max(lam, 0.0)
            self.vec_min[J] = basis[:, 0]
        # the relative rule: A_J counts as non-singular iff
        # sigma_min(A_J) > rank_rtol * sigma_max(A).  The classification uses
        # singular values of the submatrices themselves: eigenvalues of the
        # Gram cannot resolve sigma_min below sqrt(eps) relative, which would
        # misclassify exactly singular subsets (e.g. a row next to its own
        # negation) as invertible.
        thresh = tol.rank_rtol * self.sigma_max
        subs = arr[np.array(self.subsets)]
        svals = np.linalg.svd(subs, compute_uv=False)
        self.sigma_min = {J: float(svals[i, -1]) for i, J in enumerate(self.subsets)}
        self.nonsingular = [J for J in self.subsets if self.sigma_min[J] > thresh]
        if not self.nonsingular:
            raise RankDeficientError("no non-singular n x n row submatrix found")
        self._min_cert_cache: dict[int, SupportCertificate | None] = {}

    def sub_support_indices(self, J: tuple[int, ...]) -> list[int]:
        """Table indices of every nonempty K contained in J."""
        idx = self.table.index
        return [idx[K] for k in range(1, len(J) + 1) for K in combinations(J, k)]

    def union_support_indices(self) -> list[int]:
        """Table indices of every K contained in some non-singular J."""
        seen: set[int] = set()
        for J in self.nonsingular:
            seen.update(self.sub_support_indices(J))
        return sorted(seen)

    def min_certificate(self, sidx: int) -> SupportCertificate | None:
        if sidx not in self._min_cert_cache:
            self._min_cert_cache[sidx] = self.table.min_certificate(sidx)
        return self._min_cert_cache[sidx]


def _collect_ties(values, best_J, best, rtol):
    return [J for J, v in values if J != best_J and abs(v - best) <= rtol * best]


def chi_from_scan(scan: SubsetScan) -> MeasureResult:
    best_J = None
    best = -math.inf
    values = []
    for J in scan.nonsingular:
        val = 1.0 / math.sqrt(scan.lam_min[J])
        values.append((J, val))
        if val > best:
            best, best_J = val, J
    witness = np.zeros(scan.m)
    witness[list(best_J)] = scan.vec_min[best_J]
    k = int(np.argmax(np.abs(witness)))
    if witness[k] < 0:
        witness = -witness
    return MeasureResult(
        name="chi",
        value=best,
        argmax_subset=best_J,
        witness=witness,
        ties=_collect_ties(values, best_J, best, scan.tol.verify_rtol),
    )


def hoffman_from_scan(scan: SubsetScan) -> MeasureResult:
    best_J = None
    best = -math.inf
    best_cert: SupportCertificate | None = None
    values = []
    for J in scan.nonsingular:
        inner = None
        for sidx in scan.sub_support_indices(J):
            cand = scan.min_certificate(sidx)
            if cand is not None and (inner is None or cand.value < inner.value):
                inner = cand
        # singleton supports always qualify, so inner is never None
        val = 1.0 / inner.value
        values.append((J, val))
        if val > best:
            best, best_J, best_cert = val, J, inner
    return MeasureResult(
        name="hoffman",
        value=best,
        argmax_subset=best_J,
        witness=best_cert.witness,
        degenerate=best_cert.degenerate,
        notes=[f"attaining support {best_cert.support}"],
        ties=_collect_ties(values, best_J, best, scan.tol.verify_rtol),
    )


def chi(a, tol: Tolerances = DEFAULT_TOL, seed: int = 0) -> MeasureResult:
    """Max of ||A_J^{-1}|| over non-singular n x n row submatrices A_J."""
    return chi_from_scan(SubsetScan(a, tol, seed=seed))


def chibar(a, tol: Tolerances = DEFAULT_TOL, seed: int = 0) -> MeasureResult:
    """Range-space variant of chi, via an orthonormal basis of range(a)."""
    arr = as_matrix(a)
    _require_full_column_rank(arr, tol)
    q = qr_orthonormal(arr, tol)
    res = chi_from_scan(SubsetScan(q, tol, seed=seed))
    res.name = "chibar"
    res.notes.append("computed as chi of an orthonormal basis of range(A)")
    return res


def hoffman(a, tol: Tolerances = DEFAULT_TOL, seed: int = 0) -> MeasureResult:
    """Error-bound constant of Ax <= b, by submatrix/cone enumeration."""
    return hoffman_from_scan(SubsetScan(a, tol, seed=seed))


def hoffmanbar(a, tol: Tolerances = DEFAULT_TOL, seed: int = 0) -> MeasureResult:
    """Range-space variant of the error-bound constant."""
    arr = as_matrix(a)
    q = qr_orthonormal(arr, tol)  # raises on the zero matrix
    res = hoffman_from_scan(SubsetScan(q, tol, seed=seed))
    res.name = "hoffmanbar"
    res.notes.append("computed as hoffman of an orthonormal basis of range(A)")
    return res


def _cone_min_full(arr: np.ndarray, tol: Tolerances, seed: int):
    # A A^T has rank n, so the cone minimum lives on supports of size <= n+1
    m, n = arr.shape
    cap = min(m, n + 1)
    return cone_min(arr @ arr.T, tol, seed=seed, max_support_size=cap, rank=min(m, n))


def renegar_distance(a, tol: Tolerances = DEFAULT_TOL, seed: int = 0) -> MeasureResult:
    """Distance to infeasibility of Ax > 0: min ||A^T v|| over unit v >= 0.

    Refuses inputs that are not strictly feasible; the raised error carries
    the alternative certificate (a unit nonnegative v with ||A^T v|| ~= 0).
    """
    arr = as_matrix(a)
    value, cert = _cone_min_full(arr, tol, seed)
    if value <= tol.feas_tol:
        raise NotStrictlyFeasibleError(
            f"Ax > 0 is not strictly feasible: min ||A^T v|| = {value:.3e} "
            f"<= feas_tol = {tol.feas_tol:.3e}",
            certificate=cert.witness,
        )
    return MeasureResult(
        name="renegar",
        value=value,
        argmax_subset=cert.support,
        witness=cert.witness,
        degenerate=cert.degenerate,
        notes=[RENEGAR_CONVENTION_NOTE],
    )


def hoffman_simple(a, tol: Tolerances = DEFAULT_TOL, seed: int = 0) -> MeasureResult:
    """Single-cone form of the error-bound constant, valid under strict
    feasibility: max ||v|| over v >= 0 with ||A^T v|| = 1.

    Independent code path from hoffman(); the two must agree whenever
    Ax > 0 is strictly feasible.
    """
    arr = as_matrix(a)
    _require_full_column_rank(arr, tol)
    value, cert = _cone_min_full(arr, tol, seed)
    if value <= tol.feas_tol:
        raise NotStrictlyFeasibleError(
            f"Ax > 0 is not strictly feasible: min ||A^T v|| = {value:.3e}",
            certificate=cert.witness,
        )
    return MeasureResult(
        name="hoffman",
        value=1.0 / value,
        argmax_subset=cert.support,
        witness=cert.witness,
        degenerate=cert.degenerate,
        notes=["single-cone path (valid under strict feasibility)"],
    )


def grassmann(a, tol: Tolerances = DEFAULT_TOL, seed: int = 0) -> MeasureResult:
    """Subspace condition number: reciprocal distance to infeasibility of an
    orthonormal basis of range(a)."""
    arr = as_matrix(a)
    q = qr_orthonormal(arr, tol)
    inner = renegar_distance(q, tol, seed=seed)
    return MeasureResult(
        name="grassmann",
        value=1.0 / inner.value,
        argmax_subset=inner.argmax_subset,
        witness=inner.witness,
        degenerate=inner.degenerate,
        notes=["computed as 1/R of an orthonormal basis of range(A)"]
        + inner.notes,
    )


def stack_pm(a) -> np.ndarray:
    """Vertical concatenation of A and -A (2m x n)."""
    arr = as_matrix(a)
    return np.vstack([arr, -arr])


def strip_zero_rows(a, tol: Tolerances = DEFAULT_TOL) -> tuple[np.ndarray, tuple[int, ...]]:
    """Remove rows with norm <= 1e-12 * ||A||; returns (matrix, kept indices)."""
    arr = as_matrix(a)
    thresh = 1e-12 * operator_norm(arr)
    kept = tuple(i for i in range(arr.shape[0]) if np.linalg.norm(arr[i]) > thresh)
    if not kept:
        raise ZeroMatrixError("all rows are zero")
    return arr[list(kept)], kept


def wls_pseudoinverse(a, d, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """Weighted pseudo-inverse (A^T D A)^{-1} A^T D for positive weights d.

    Evaluated as pinv(D^{1/2} A) D^{1/2}, which is the same operator but
    remains accurate for weight ratios far beyond what the normal-equations
    form tolerates.
    """
    arr = as_matrix(a)
    _require_full_column_rank(arr, tol)
    w = as_vector(d, arr.shape[0])
    if np.any(w <= 0.0):
        raise ShapeError("weights must be strictly positive")
    sq = np.sqrt(w)
    return np.linalg.pinv(sq[:, None] * arr) * sq[None, :]
