"""Extremes of v^T G v over the unit sphere intersected with the nonnegative
orthant, by finite enumeration of supports.

For every nonempty support K the eigenpairs of the principal submatrix
G[K,K] are examined; an eigenpair is a candidate extreme iff its eigenvector
(or its negative) is entrywise nonnegative up to slack.  Every local extreme
of the constrained Rayleigh quotient has this form, so the candidate list is
sound and the min/max over it are exact.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

import math
import numpy as np

from .errors import EnumerationCapError, NotPSDError, NotSymmetricError, ShapeError
from .linalg import DEFAULT_TOL, Tolerances, as_matrix

#: supports larger than this are refused (the scan is 2^m)
DEFAULT_SUPPORT_CAP = 20

#: restarts for the alternating-projection probe of degenerate eigenspaces
_AP_RESTARTS = 64
_AP_ITERS = 200


@dataclass
class SupportCertificate:
    """Witness for one candidate extreme of the cone-constrained quotient.

    support      row indices K (0-based, sorted)
    eigenvalue   eigenvalue of G[K,K] (clamped to >= 0)
    witness      unit vector of full length, zero off K, nonnegative up to slack
    value        sqrt(eigenvalue)
    degenerate   True when the eigenvalue belongs to a multi-dimensional
                 eigenspace and the nonnegative representative was found by
                 the alternating-projection heuristic
    """

    support: tuple[int, ...]
    eigenvalue: float
    witness: np.ndarray
    value: float
    degenerate: bool = False


def supports_by_size(m: int, max_size: int):
    """All nonempty subsets of range(m), by increasing cardinality then lex."""
    for k in range(1, max_size + 1):
        yield from combinations(range(m), k)


def _nonneg_in_span(basis: np.ndarray, atol: float, rng) -> np.ndarray | None:
    """Search a subspace (given by an orthonormal basis) for a nonnegative
    unit vector by alternating projection between the subspace and the cone."""
    k = basis.shape[0]
    x = rng.standard_normal((k, _AP_RESTARTS))
    x /= np.maximum(np.linalg.norm(x, axis=0), 1e-300)
    for _ in range(_AP_ITERS):
        y = np.clip(basis @ (basis.T @ x), 0.0, None)
        nrm = np.linalg.norm(y, axis=0)
        dead = nrm <= 1e-300
        if np.all(dead):
            return None
        x = np.where(dead, x, y / np.maximum(nrm, 1e-300))
        residual = np.linalg.norm(x - basis @ (basis.T @ x), axis=0)
        ok = (residual <= atol) & (x.min(axis=0) >= -atol) & ~dead
        if np.any(ok):
            v = basis @ (basis.T @ x[:, int(np.argmax(ok))])
            v /= np.linalg.norm(v)
            if v.min() >= -atol:
                return v
    return None


def nonneg_representative(
    basis: np.ndarray, atol: float, rng_seed=(0,)
) -> tuple[np.ndarray, bool] | None:
    """Nonnegative unit vector in the span of `basis` (columns), or None.

    One-dimensional spans are decided exactly by a sign test; wider spans use
    the alternating-projection heuristic (flagged degenerate by the caller).
    """
    if basis.shape[1] == 1:
        u = basis[:, 0]
        if u.min() >= -atol:
            return u.copy(), False
        if (-u).min() >= -atol:
            return -u, False
        return None
    rng = np.random.default_rng(rng_seed)
    v = _nonneg_in_span(basis, atol, rng)
    if v is None:
        return None
    return v, True


class ConeTable:
    """Precomputed eigensystems of every principal submatrix of G.

    The table is the shared engine behind cone_min/cone_max and the signed
    scans: eigenvalues of S G S restricted to a support equal those of G, and
    eigenvectors just flip signs, so one table serves all 2^m signatures.
    """

    def __init__(
        self,
        g,
        tol: Tolerances = DEFAULT_TOL,
        max_support_size: int | None = None,
        seed: int = 0,
        support_cap: int | None = None,
        rank: int | None = None,
    ):
        arr = as_matrix(g)
        m, n = arr.shape
        if m != n:
            raise ShapeError(f"expected a square matrix, got {arr.shape}")
        scale = float(np.max(np.abs(arr))) or 1.0
        if np.max(np.abs(arr - arr.T)) > 1e-12 * scale:
            raise NotSymmetricError("matrix is not symmetric within 1e-12 relative")
        if support_cap is None:
            support_cap = DEFAULT_SUPPORT_CAP
        if m > support_cap:
            raise EnumerationCapError(
                f"support enumeration over {m} rows exceeds the cap {support_cap}"
            )
        spectrum = np.linalg.eigvalsh(arr)
        self.scale = float(max(abs(spectrum[0]), abs(spectrum[-1]))) or 1.0
        if spectrum[0] < -1e-9 * self.scale:
            raise NotPSDError(
                f"matrix is not PSD within tolerance (lambda_min={spectrum[0]:.3e})"
            )
        self.g = arr
        self.m = m
        self.tol = tol
        self.seed = seed
        self.max_support_size = m if max_support_size is None else min(max_support_size, m)
        #: known upper bound on rank(G); principal submatrices on more rows
        #: than this have structurally zero eigenvalues, which are clamped to
        #: exact zero instead of the eps-level noise eigh reports for them
        self.rank = m if rank is None else min(rank, m)
        self.supports: list[tuple[int, ...]] = []
        #: per support: list of (eigenvalue, orthonormal basis) groups, descending
        self.eigensystems: list[list[tuple[float, np.ndarray]]] = []
        self._build()
        self.index = {K: i for i, K in enumerate(self.supports)}
        self._rep_cache: dict = {}

    def _build(self):
        group_tol = 1e-9 * self.scale
        for k in range(1, self.max_support_size + 1):
            combos = list(combinations(range(self.m), k))
            idx = np.array(combos)
            subs = self.g[idx[:, :, None], idx[:, None, :]]
            w, v = np.linalg.eigh(subs)
            if k > self.rank:
                w[:, : k - self.rank] = 0.0
            for c in range(len(combos)):
                groups: list[tuple[float, np.ndarray]] = []
                j = k - 1
                while j >= 0:
                    i = j
                    while i > 0 and w[c, j] - w[c, i - 1] <= group_tol:
                        i -= 1
                    lam = float(np.mean(w[c, i : j + 1]))
                    groups.append((lam, v[c][:, i : j + 1].copy()))
                    j = i - 1
                self.supports.append(combos[c])
                self.eigensystems.append(groups)

    def _representative(self, sidx: int, gidx: int, signs_key: tuple):
        key = (sidx, gidx, signs_key)
        if key not in self._rep_cache:
            _, basis = self.eigensystems[sidx][gidx]
            flipped = np.array(signs_key, dtype=float)[:, None] * basis
            self._rep_cache[key] = nonneg_representative(
                flipped, self.tol.nonneg_atol, rng_seed=(self.seed, sidx, gidx)
            )
        return self._rep_cache[key]

    def candidates_for(self, sidx: int, signs=None) -> list[SupportCertificate]:
        """Candidates for one support, eigenvalue descending.

        `signs` is an optional full-length vector of +-1 row signs; candidates
        are those of (S G S) restricted to the support.
        """
        K = self.supports[sidx]
        if signs is None:
            signs_key = (1.0,) * len(K)
        else:
            signs_key = tuple(float(signs[i]) for i in K)
        out = []
        for gidx, (lam, basis) in enumerate(self.eigensystems[sidx]):
            rep = self._representative(sidx, gidx, signs_key)
            if rep is None:
                continue
            vec, heuristic = rep
            witness = np.zeros(self.m)
            witness[list(K)] = vec
            lam_c = max(lam, 0.0)
            out.append(
                SupportCertificate(
                    support=K,
                    eigenvalue=lam_c,
                    witness=witness,
                    value=math.sqrt(lam_c),
                    degenerate=heuristic or basis.shape[1] > 1,
                )
            )
        return out

    def candidates(self, signs=None) -> list[SupportCertificate]:
        out = []
        for sidx in range(len(self.supports)):
            out.extend(self.candidates_for(sidx, signs))
        return out

    def min_certificate(self, sidx: int, signs=None) -> SupportCertificate | None:
        """Smallest-value candidate for one support (None if all rejected)."""
        best = None
        for cand in self.candidates_for(sidx, signs):
            if best is None or cand.value < best.value:
                best = cand
        return best


def cone_candidates(
    g,
    tol: Tolerances = DEFAULT_TOL,
    seed: int = 0,
    support_cap: int | None = None,
    max_support_size: int | None = None,
    rank: int | None = None,
) -> list[SupportCertificate]:
    """All candidate extremes of v^T G v on the sphere-cone intersection.

    `max_support_size` restricts the enumerated supports.  That is lossless
    for the minimum when G has rank r and the cap is at least r+1: on any
    larger support the smallest eigenvalue of the principal submatrix is
    zero, and a zero-valued nonnegative witness reduces to at most r+1 rows
    by the conic Caratheodory theorem, while an interior-face minimizer with
    positive value must sit at the smallest eigenvalue of its submatrix and
    therefore on a support where that submatrix is nonsingular.
    """
    table = ConeTable(
        g,
        tol,
        max_support_size=max_support_size,
        seed=seed,
        support_cap=support_cap,
        rank=rank,
    )
    return table.candidates()


def _reduce(cands: list[SupportCertificate], want_max: bool):
    if not cands:
        raise RuntimeError("internal error: empty cone candidate list")
    best = cands[0]
    for cand in cands[1:]:
        if (cand.value > best.value) if want_max else (cand.value < best.value):
            best = cand
    return best.value, best


def cone_max(g, tol: Tolerances = DEFAULT_TOL, seed: int = 0, support_cap: int | None = None):
    """Exact max of sqrt(v^T G v) over {v >= 0, ||v|| = 1}, with certificate.

    Ties break toward the earliest candidate in canonical enumeration order
    (support by cardinality then lex), i.e. the lexicographically smallest
    support.
    """
    return _reduce(cone_candidates(g, tol, seed, support_cap), want_max=True)


def cone_min(
    g,
    tol: Tolerances = DEFAULT_TOL,
    seed: int = 0,
    support_cap: int | None = None,
    max_support_size: int | None = None,
    rank: int | None = None,
):
    """Exact min of sqrt(v^T G v) over {v >= 0, ||v|| = 1}, with certificate."""
    return _reduce(
        cone_candidates(g, tol, seed, support_cap, max_support_size, rank), want_max=False
    )
