"""Signature enumeration, strict feasibility, and identity verification.

A signature is a vector of +-1 row signs.  The measures built from Gram
eigensystems interact with signatures in a simple way: the eigenvalues of
S G S on a support equal those of G, and the eigenvectors just flip entry
signs.  The signed scans below therefore reuse one precomputed cone table
and decide candidate acceptance per signature with bitmask tests, instead of
recomputing eigendecompositions 2^m times.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .coneig import ConeTable
from .errors import CondmeasError, EnumerationCapError, ShapeError, ZeroMatrixError
from .linalg import DEFAULT_TOL, Tolerances, as_matrix, operator_norm
from .measures import (
    SubsetScan,
    chi_from_scan,
    hoffman,
    qr_orthonormal,
    stack_pm,
    strip_zero_rows,
)

#: hard cap on the 2^m signature scan
SIGNATURE_CAP = 16


@dataclass
class FeasibilityResult:
    """Outcome of the strict-feasibility test for Ax > 0.

    When feasible, `witness` is x with Ax > 0 componentwise; otherwise it is
    the alternative certificate: a unit v >= 0 with ||A^T v|| <= feas_tol.
    `value` is min ||A^T v|| over unit nonnegative v.
    """

    feasible: bool
    witness: np.ndarray
    value: float
    notes: list[str] = field(default_factory=list)

    def __bool__(self):
        return self.feasible


@dataclass
class VerificationReport:
    """One identity check: left value vs right value at tolerance."""

    identity_name: str
    lhs: float
    rhs: float
    abs_err: float
    rel_err: float
    passed: bool
    witnesses: dict = field(default_factory=dict)
    notes: list[str] = field(default_factory=list)


def make_report(name, lhs, rhs, tol: Tolerances, witnesses=None, notes=None,
                force_fail=False) -> VerificationReport:
    abs_err = abs(lhs - rhs)
    denom = max(abs(lhs), abs(rhs))
    rel_err = abs_err / denom if denom > 0 else 0.0
    passed = rel_err <= tol.verify_rtol or (denom < 1.0 and abs_err <= tol.verify_rtol)
    return VerificationReport(
        identity_name=name,
        lhs=float(lhs),
        rhs=float(rhs),
        abs_err=float(abs_err),
        rel_err=float(rel_err),
        passed=bool(passed) and not force_fail,
        witnesses=witnesses or {},
        notes=notes or [],
    )


def signature_from_index(i: int, m: int) -> np.ndarray:
    """Signature number i in binary-counter order: row j flips when bit
    (m-1-j) of i is set, so the last row flips fastest."""
    signs = np.ones(m, dtype=int)
    for j in range(m):
        if (i >> (m - 1 - j)) & 1:
            signs[j] = -1
    return signs


def enumerate_signatures(m: int):
    """All 2^m signatures in binary-counter order."""
    if m > SIGNATURE_CAP:
        raise EnumerationCapError(
            f"signature scan over 2^{m} signatures exceeds the cap m <= {SIGNATURE_CAP}"
        )
    for i in range(1 << m):
        yield signature_from_index(i, m)


def apply_signature(signs, a) -> np.ndarray:
    arr = as_matrix(a)
    s = np.asarray(signs)
    if s.ndim != 1 or s.shape[0] != arr.shape[0]:
        raise ShapeError("signature length must equal the row count")
    if not np.all(np.abs(s) == 1):
        raise ShapeError("signature entries must be exactly +1 or -1")
    return s[:, None] * arr


def _row_bit(row: int, m: int) -> int:
    return 1 << (m - 1 - row)


def signed_min_values(table: ConeTable, support_indices, m: int,
                      tol: Tolerances) -> np.ndarray:
    """For every signature s (by index), the minimum accepted candidate value
    of S G S over the given supports of `table`.

    A rank-one candidate with eigenvector u on support K is accepted under s
    iff the signs of s agree with u (or with -u) on every entry of u that is
    significantly nonzero; that is a pair of bitmask equalities.  Degenerate
    eigenspaces fall back to the alternating-projection probe, memoized per
    sign pattern on K and probed only for signatures whose running minimum
    the group could still improve (structural multiplicities, such as the
    unit eigenvalues of subframes of an orthonormal basis, are pruned away
    entirely by the cheap rank-one candidates).
    """
    nsig = 1 << m
    sigbits = np.arange(nsig, dtype=np.int64)
    out = np.full(nsig, np.inf)
    atol = tol.nonneg_atol
    degenerate = []
    for sidx in support_indices:
        K = table.supports[sidx]
        kbits = [_row_bit(r, m) for r in K]
        kmask = sum(kbits)
        for gidx, (lam, basis) in enumerate(table.eigensystems[sidx]):
            value = math.sqrt(max(lam, 0.0))
            if basis.shape[1] > 1:
                degenerate.append((value, sidx, gidx, kbits, kmask))
                continue
            u = basis[:, 0]
            mask = 0
            neg = 0
            for j, b in enumerate(kbits):
                if abs(u[j]) > atol:
                    mask |= b
                    if u[j] < 0:
                        neg |= b
            masked = sigbits & mask
            active = (masked == neg) | (masked == (neg ^ mask))
            np.minimum(out, np.where(active, value, np.inf), out=out)
    # decide degenerate groups once per sign pattern on K, cheapest first
    for value, sidx, gidx, kbits, kmask in sorted(degenerate, key=lambda t: t[0]):
        restricted = sigbits & kmask
        need = value < out
        if not np.any(need):
            continue
        for key in np.unique(restricted[need]):
            signs_key = tuple(-1.0 if (int(key) & b) else 1.0 for b in kbits)
            if table._representative(sidx, gidx, signs_key) is not None:
                np.minimum(out, np.where(restricted == key, value, np.inf), out=out)
    return out


class SignedScan:
    """Vectorized values of H(SA), R(SA) and strict feasibility of SA for
    all 2^m signatures S, sharing one submatrix scan of A."""

    def __init__(self, a, tol: Tolerances = DEFAULT_TOL, seed: int = 0):
        arr = as_matrix(a)
        m = arr.shape[0]
        if m > SIGNATURE_CAP:
            raise EnumerationCapError(
                f"signature scan over 2^{m} signatures exceeds the cap m <= {SIGNATURE_CAP}"
            )
        self.a = arr
        self.m = m
        self.tol = tol
        self.scan = SubsetScan(arr, tol, seed=seed)
        # the full Gram has rank n, so its cone minimum (for any row signing)
        # is attained on a support of size at most n+1; capping the table
        # there also keeps the zero eigenspaces one-dimensional, avoiding the
        # projection heuristic on generic inputs
        cap = min(m, self.scan.n + 1)
        self._full_table = ConeTable(
            self.scan.gram, tol, max_support_size=cap, seed=seed, rank=self.scan.n
        )
        # H(SA) = 1 / min over supports contained in a non-singular J
        with np.errstate(divide="ignore"):
            self.hoffman_values = 1.0 / signed_min_values(
                self.scan.table, self.scan.union_support_indices(), m, tol
            )
        # R(SA) = min over all supports of the full Gram
        self.renegar_values = signed_min_values(
            self._full_table, range(len(self._full_table.supports)), m, tol
        )
        row_norms = np.linalg.norm(arr, axis=1)
        self.rows_nonzero = bool(np.all(row_norms > 1e-12 * self.scan.sigma_max))
        self.feasible = self.rows_nonzero & (self.renegar_values > tol.feas_tol)

    @property
    def chi(self):
        return chi_from_scan(self.scan)


def _simplex_quadratic_min(gram: np.ndarray, tol: Tolerances) -> np.ndarray | None:
    """Exact minimizer of v^T G v over the probability simplex, by support
    enumeration with KKT verification."""
    m = gram.shape[0]
    spectrum = np.linalg.eigvalsh(gram)
    scale = float(max(abs(spectrum[0]), abs(spectrum[-1]))) or 1.0
    ones_cache = {}
    for k in range(1, m + 1):
        ones_cache[k] = np.ones(k)
        for K in combinations(range(m), k):
            sub = gram[np.ix_(K, K)]
            w = np.linalg.eigvalsh(sub)
            if w[0] <= 1e-12 * scale:
                continue
            y = np.linalg.solve(sub, ones_cache[k])
            total = y.sum()
            if abs(total) < 1e-300:
                continue
            vk = y / total
            if vk.min() < -1e-9:
                continue
            mu = float(vk @ sub @ vk)
            grad = gram[:, list(K)] @ vk
            off = [i for i in range(m) if i not in K]
            if off and np.min(grad[off]) < mu - 1e-9 * scale:
                continue
            v = np.zeros(m)
            v[list(K)] = np.clip(vk, 0.0, None)
            return v / v.sum()
    return None


def strictly_feasible(a, tol: Tolerances = DEFAULT_TOL, seed: int = 0) -> FeasibilityResult:
    """Decide Ax > 0 via the theorem of the alternative: infeasible iff some
    nonzero v >= 0 has A^T v = 0, detected as cone_min(A A^T) <= feas_tol.

    On the feasible side an explicit x is recovered from the simplex-
    constrained least-norm point of {A^T v} and verified by substitution.
    """
    arr = as_matrix(a)
    m = arr.shape[0]
    norm_a = operator_norm(arr)
    row_norms = np.linalg.norm(arr, axis=1)
    zero_rows = np.where(row_norms <= 1e-12 * norm_a)[0]
    if zero_rows.size:
        cert = np.zeros(m)
        cert[zero_rows[0]] = 1.0
        return FeasibilityResult(
            feasible=False, witness=cert, value=0.0,
            notes=[f"row {int(zero_rows[0])} is zero; Ax > 0 cannot hold"],
        )
    from .coneig import cone_min

    cap = min(m, arr.shape[1] + 1)
    value, cert = cone_min(
        arr @ arr.T, tol, seed=seed, max_support_size=cap, rank=min(m, arr.shape[1])
    )
    if value <= tol.feas_tol:
        return FeasibilityResult(feasible=False, witness=cert.witness, value=value)

    vhat = _simplex_quadratic_min(arr @ arr.T, tol)
    candidates = []
    if vhat is not None:
        candidates.append(arr.T @ vhat)
    candidates.append(arr.T @ cert.witness)
    candidates.append(np.linalg.lstsq(arr, np.ones(m), rcond=None)[0])
    for x in candidates:
        nrm = np.linalg.norm(x)
        if nrm == 0.0:
            continue
        x = x / nrm
        if np.min(arr @ x) > 0.0:
            return FeasibilityResult(feasible=True, witness=x, value=value)
    raise CondmeasError(
        "strict feasibility detected but no verified interior witness found"
    )


def signed_max_hoffman(
    a,
    filter_feasible: bool = False,
    tol: Tolerances = DEFAULT_TOL,
    seed: int = 0,
):
    """Max of H(SA) over all signatures S (optionally only strictly feasible
    SA), with the first-attaining signature and a comparison against chi(A).

    Returns (value, argmax_signature, report).
    """
    scan = SignedScan(a, tol, seed=seed)
    values = scan.hoffman_values
    if filter_feasible:
        if not scan.rows_nonzero:
            raise ZeroMatrixError(
                "filter_feasible requires all rows nonzero (strip zero rows first)"
            )
        if not np.any(scan.feasible):
            raise CondmeasError("no strictly feasible signature exists")
        values = np.where(scan.feasible, values, -np.inf)
    best_idx = int(np.argmax(values))
    best = float(values[best_idx])
    signature = signature_from_index(best_idx, scan.m)
    chi_res = scan.chi
    report = make_report(
        "chi_equals_max_signed_hoffman" + ("_feasible" if filter_feasible else ""),
        chi_res.value,
        best,
        tol,
        witnesses={
            "argmax_signature": signature.tolist(),
            "chi_argmax_subset": list(chi_res.argmax_subset),
        },
    )
    return best, signature, report


def verify_identities(a, tol: Tolerances = DEFAULT_TOL, seed: int = 0) -> list[VerificationReport]:
    """Mechanical checks of the equivalence identities between the measures,
    one report per applicable identity."""
    arr = as_matrix(a)
    scan = SignedScan(arr, tol, seed=seed)
    chi_val = scan.chi.value
    reports: list[VerificationReport] = []

    def argmax_sig(values, mask=None):
        vals = values if mask is None else np.where(mask, values, -np.inf)
        i = int(np.argmax(vals))
        return signature_from_index(i, scan.m).tolist()

    # (i) chi(A) = max_S H(SA)
    reports.append(
        make_report(
            "chi_equals_max_signed_hoffman",
            chi_val,
            float(np.max(scan.hoffman_values)),
            tol,
            witnesses={"argmax_signature": argmax_sig(scan.hoffman_values)},
        )
    )

    # (ii) chi(A) = H([A; -A])
    reports.append(
        make_report(
            "chi_equals_hoffman_of_plus_minus_stack",
            chi_val,
            hoffman(stack_pm(arr), tol, seed=seed).value,
            tol,
        )
    )

    # (iii) restricting to strictly feasible signatures loses nothing
    if scan.rows_nonzero:
        if np.any(scan.feasible):
            rhs = float(np.max(scan.hoffman_values[scan.feasible]))
            reports.append(
                make_report(
                    "chi_equals_max_signed_hoffman_feasible",
                    chi_val,
                    rhs,
                    tol,
                    witnesses={
                        "argmax_signature": argmax_sig(scan.hoffman_values, scan.feasible)
                    },
                )
            )
        else:
            reports.append(
                make_report(
                    "chi_equals_max_signed_hoffman_feasible",
                    chi_val,
                    math.nan,
                    tol,
                    force_fail=True,
                    notes=["no strictly feasible signature exists: hard failure"],
                )
            )

    # (iv) the range-space analogues, via an orthonormal basis Q of range(A):
    # S Q is an orthonormal basis of range(SA), so the scan over Q covers
    # every H̄(SA)
    q = qr_orthonormal(arr, tol)
    scan_q = SignedScan(q, tol, seed=seed)
    chibar_val = scan_q.chi.value
    reports.append(
        make_report(
            "chibar_equals_max_signed_hoffmanbar",
            chibar_val,
            float(np.max(scan_q.hoffman_values)),
            tol,
            witnesses={"argmax_signature": argmax_sig(scan_q.hoffman_values)},
        )
    )
    # Stacking doubles every squared row norm of an orthonormal range basis:
    # a basis of range([A; -A]) is [Q; -Q]/sqrt(2), so the range-space
    # error-bound constant of the stack carries a sqrt(2) factor relative to
    # the scan identity above.  The unscaled equality fails on every input
    # (try the identity matrix); the scaled form below is the one that holds.
    stack_q = qr_orthonormal(stack_pm(arr), tol)
    reports.append(
        make_report(
            "chibar_equals_hoffmanbar_of_plus_minus_stack_scaled",
            math.sqrt(2.0) * chibar_val,
            hoffman(stack_q, tol, seed=seed).value,
            tol,
            notes=[
                "checked as sqrt(2)*chibar(A) = hoffmanbar([A; -A]); the "
                "orthonormal-range reduction of the stacked matrix rescales "
                "distances by sqrt(2)"
            ],
        )
    )

    # (v) H(SA) * R(SA) = 1 for every strictly feasible SA
    if np.any(scan.feasible):
        products = scan.hoffman_values[scan.feasible] * scan.renegar_values[scan.feasible]
        worst = int(np.argmax(np.abs(products - 1.0)))
        reports.append(
            make_report(
                "hoffman_times_renegar_equals_one_feasible",
                float(products[worst]),
                1.0,
                tol,
                notes=[f"worst over {int(np.sum(scan.feasible))} strictly feasible signatures"],
            )
        )

    # (vi) chi(A) = max over strictly feasible S of 1/R(SA)
    if scan.rows_nonzero and np.any(scan.feasible):
        with np.errstate(divide="ignore"):
            inv_r = np.where(scan.feasible, 1.0 / scan.renegar_values, -np.inf)
        reports.append(
            make_report(
                "chi_equals_max_signed_inverse_renegar_feasible",
                chi_val,
                float(np.max(inv_r)),
                tol,
                witnesses={"argmax_signature": argmax_sig(inv_r)},
            )
        )

    # (vii) chibar(A) = max over strictly feasible S of G(SA), where
    # G(SA) = 1/R(SQ)
    if scan.rows_nonzero:
        feas_q = scan_q.renegar_values > tol.feas_tol
        if np.any(feas_q):
            with np.errstate(divide="ignore"):
                grass = np.where(feas_q, 1.0 / scan_q.renegar_values, -np.inf)
            reports.append(
                make_report(
                    "chibar_equals_max_signed_grassmann_feasible",
                    chibar_val,
                    float(np.max(grass)),
                    tol,
                    witnesses={"argmax_signature": argmax_sig(grass)},
                )
            )

    # (viii) zero-row amendment: the feasibility-filtered identities hold for
    # the matrix with zero rows removed, whose chi equals chi(A)
    if not scan.rows_nonzero:
        stripped, kept = strip_zero_rows(arr, tol)
        sub = SignedScan(stripped, tol, seed=seed)
        if np.any(sub.feasible):
            reports.append(
                make_report(
                    "chi_equals_max_signed_hoffman_feasible_stripped",
                    chi_val,
                    float(np.max(sub.hoffman_values[sub.feasible])),
                    tol,
                    witnesses={"kept_rows": list(kept)},
                )
            )
            reports.append(
                make_report(
                    "chi_equals_max_signed_inverse_renegar_feasible_stripped",
                    chi_val,
                    float(np.max(1.0 / sub.renegar_values[sub.feasible])),
                    tol,
                    witnesses={"kept_rows": list(kept)},
                )
            )
        else:
            reports.append(
                make_report(
                    "chi_equals_max_signed_hoffman_feasible_stripped",
                    chi_val,
                    math.nan,
                    tol,
                    force_fail=True,
                    notes=["no strictly feasible signature exists: hard failure"],
                )
            )

    return reports
