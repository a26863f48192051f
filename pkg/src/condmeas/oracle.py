"""Independent Monte Carlo and brute-force cross-checks for the measures.

Nothing in this module reuses the enumeration machinery: lower bounds for
chi/chibar come from sampling weighted pseudo-inverses, empirical Hoffman
ratios come from exact polyhedral projections by active-set enumeration, and
the cone extremes are bracketed by nonnegative sphere samples.  Agreement
between these estimates and the exact values is the main evidence that the
enumeration is right.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .errors import InfeasibleError, ShapeError
from .linalg import DEFAULT_TOL, Tolerances, as_matrix, as_vector, operator_norm
from .measures import wls_pseudoinverse


@dataclass(frozen=True)
class RngConfig:
    """Sampling configuration.

    Weights are drawn log-uniformly over [10^-weight_log_range,
    10^weight_log_range]: the extremizing diagonal is a degenerate limit, so
    uniform sampling would systematically miss it.
    """

    seed: int = 0
    sample_count: int = 10000
    weight_log_range: float = 6.0

    def __post_init__(self):
        if self.sample_count < 1:
            raise ValueError("sample_count must be >= 1")
        if self.weight_log_range <= 0:
            raise ValueError("weight_log_range must be positive")


def _sample_weights(m: int, cfg: RngConfig, rng) -> np.ndarray:
    r = cfg.weight_log_range
    return 10.0 ** rng.uniform(-r, r, size=(cfg.sample_count, m))


def _batched_wls_norms(arr: np.ndarray, weights: np.ndarray, image: bool) -> np.ndarray:
    """Largest singular value of A_D^+ (or A A_D^+) for a batch of weights."""
    root = np.sqrt(weights)  # (S, m)
    scaled = root[:, :, None] * arr[None, :, :]  # (S, m, n)
    pinv = np.linalg.pinv(scaled) * root[:, None, :]  # (S, n, m)
    if image:
        pinv = arr[None, :, :] @ pinv
    return np.linalg.svd(pinv, compute_uv=False)[:, 0]


def sample_chi_lower(a, cfg: RngConfig, tol: Tolerances = DEFAULT_TOL):
    """Monte Carlo lower bound max_d ||A_D^+|| <= chi(A).

    Returns (best, best_weights).
    """
    arr = as_matrix(a)
    rng = np.random.default_rng(cfg.seed)
    weights = _sample_weights(arr.shape[0], cfg, rng)
    norms = _batched_wls_norms(arr, weights, image=False)
    i = int(np.argmax(norms))
    return float(norms[i]), weights[i].copy()


def sample_chibar_lower(a, cfg: RngConfig, tol: Tolerances = DEFAULT_TOL) -> float:
    """Monte Carlo lower bound max_d ||A A_D^+|| <= chibar(A)."""
    arr = as_matrix(a)
    rng = np.random.default_rng(cfg.seed)
    weights = _sample_weights(arr.shape[0], cfg, rng)
    return float(np.max(_batched_wls_norms(arr, weights, image=True)))


def directed_chi_witness(a, J, tol: Tolerances = DEFAULT_TOL) -> float:
    """||A_D^+|| at a near-degenerate D with very large weight on the rows of
    J and 1 elsewhere; approaches chi(A) when J is the chi argmax subset.

    Every positive D gives a lower bound on chi, so taking the best of a few
    weight magnitudes is safe.  The sweep matters when sigma_min(A_J) is
    small: a weight w only pins the rows of J once w * sigma_min(A_J)^2
    dwarfs the remaining rows.
    """
    arr = as_matrix(a)
    best = 0.0
    for w in (1e8, 1e11, 1e14):
        d = np.ones(arr.shape[0])
        d[list(J)] = w
        best = max(best, operator_norm(wls_pseudoinverse(arr, d, tol)))
    return best


def _active_subsets(g: np.ndarray, tol: Tolerances):
    """Constraint-row subsets F with G_F of full row rank, smallest first."""
    m, n = g.shape
    scale = operator_norm(g) or 1.0
    out = []
    for k in range(1, min(m, n) + 1):
        for F in combinations(range(m), k):
            s = np.linalg.svd(g[list(F)], compute_uv=False)
            if s[-1] > 1e-12 * scale:
                out.append(F)
    return out


def constrained_lsq(c, d, g, h, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """Exact minimizer of ||Cz - d|| subject to Gz <= h, by enumerating
    active sets and checking the KKT conditions of each candidate.

    Raises InfeasibleError iff no active set yields a feasible point.  Among
    minimizing candidates the one from the lexicographically smallest active
    set wins.
    """
    cm = as_matrix(c)
    gm = as_matrix(g)
    dv = as_vector(d)
    hv = as_vector(h)
    if cm.shape[0] != dv.shape[0] or gm.shape[0] != hv.shape[0]:
        raise ShapeError("inconsistent constrained least-squares dimensions")
    if cm.shape[1] != gm.shape[1]:
        raise ShapeError("C and G must have the same column count")
    scale = max(1.0, float(np.max(np.abs(hv))), operator_norm(gm))
    slack = 1e-9 * scale
    ctc2 = 2.0 * cm.T @ cm
    ctd2 = 2.0 * cm.T @ dv
    nz = cm.shape[1]

    def objective(z):
        return float(np.linalg.norm(cm @ z - dv) ** 2)

    candidates = []  # (objective, F, z, dual_ok)
    # unconstrained stationary point (empty active set)
    z0, *_ = np.linalg.lstsq(cm, dv, rcond=None)
    if np.all(gm @ z0 <= hv + slack):
        candidates.append((objective(z0), (), z0, True))
    for F in _active_subsets(gm, tol):
        gf = gm[list(F)]
        k = len(F)
        kkt = np.zeros((nz + k, nz + k))
        kkt[:nz, :nz] = ctc2
        kkt[:nz, nz:] = gf.T
        kkt[nz:, :nz] = gf
        rhs = np.concatenate([ctd2, hv[list(F)]])
        try:
            sol = np.linalg.solve(kkt, rhs)
        except np.linalg.LinAlgError:
            sol, *_ = np.linalg.lstsq(kkt, rhs, rcond=None)
            if np.linalg.norm(kkt @ sol - rhs) > 1e-8 * max(1.0, np.linalg.norm(rhs)):
                continue
        z, mu = sol[:nz], sol[nz:]
        if not np.all(gm @ z <= hv + slack):
            continue
        candidates.append((objective(z), F, z, bool(np.min(mu) >= -1e-9 * scale)))
    if not candidates:
        raise InfeasibleError("the constraint system Gz <= h has no solution")
    kkt_ok = [c for c in candidates if c[3]]
    pool = kkt_ok or candidates
    best = min(pool, key=lambda t: (t[0], t[1]))
    return best[2]


def hoffman_ratio_sample(a, cfg: RngConfig, tol: Tolerances = DEFAULT_TOL):
    """Empirical error-bound ratios dist(x0, P_A(b)) / ||(A x0 - b)_+||.

    Right-hand sides are built feasible by construction (b = A xhat + p with
    p >= 0) and distances are exact projections, so every ratio is a true
    lower bound on H(A).  Returns (max_ratio, used_samples).
    """
    arr = as_matrix(a)
    m, n = arr.shape
    rng = np.random.default_rng(cfg.seed)
    ns = cfg.sample_count
    xhat = rng.standard_normal((ns, n))
    p = np.abs(rng.standard_normal((ns, m)))
    x0 = rng.standard_normal((ns, n))
    b = xhat @ arr.T + p  # (ns, m)
    viol = np.clip(x0 @ arr.T - b, 0.0, None)
    denom = np.linalg.norm(viol, axis=1)
    scale = operator_norm(arr) or 1.0
    use = denom > 1e-6 * scale
    dist2 = _projection_sq_distances(arr, b[use], x0[use], scale)
    ratios = np.sqrt(dist2) / denom[use]
    return float(np.max(ratios, initial=0.0)), int(np.sum(use))


def _projection_sq_distances(arr, b, x0, scale):
    """Squared distances from each x0 to {x : A x <= b}, all samples at once.

    The projection's active constraints always admit a linearly independent
    subset F, so enumerating those and keeping the smallest KKT-valid
    distance is exact.
    """
    m, n = arr.shape
    ns = b.shape[0]
    best = np.full(ns, np.inf)
    for F in _active_subsets(arr, DEFAULT_TOL):
        af = arr[list(F)]  # (k, n)
        try:
            gram_inv = np.linalg.inv(af @ af.T)
        except np.linalg.LinAlgError:
            continue
        resid = x0 @ af.T - b[:, list(F)]  # (ns, k)
        mu = resid @ gram_inv.T  # (ns, k) multipliers / 2
        z = x0 - mu @ af  # (ns, n)
        primal = np.all(z @ arr.T <= b + 1e-9 * scale, axis=1)
        dual = np.min(mu, axis=1) >= -1e-9
        ok = primal & dual
        d2 = np.sum((z - x0) ** 2, axis=1)
        np.minimum(best, np.where(ok, d2, np.inf), out=best)
    # x0 already feasible (callers filter these out, but keep the case exact)
    feas = np.all(x0 @ arr.T <= b + 1e-9 * scale, axis=1)
    np.minimum(best, np.where(feas, 0.0, np.inf), out=best)
    return best


def hoffmanbar_ratio_sample(a, cfg: RngConfig, tol: Tolerances = DEFAULT_TOL):
    """Empirical ratios dist(y, A P_A(b)) / ||(y - b)_+|| for y in range(A);
    lower bounds on hoffmanbar(A).  Returns (max_ratio, used_samples)."""
    arr = as_matrix(a)
    m, n = arr.shape
    rng = np.random.default_rng(cfg.seed)
    ns = cfg.sample_count
    b = rng.standard_normal((ns, n)) @ arr.T + np.abs(rng.standard_normal((ns, m)))
    y = rng.standard_normal((ns, n)) @ arr.T  # (ns, m), in range(A)
    viol = np.clip(y - b, 0.0, None)
    denom = np.linalg.norm(viol, axis=1)
    scale = operator_norm(arr) or 1.0
    use = denom > 1e-6 * scale
    bs, ys = b[use], y[use]
    nb = bs.shape[0]
    # minimize ||Az - y|| s.t. Az <= b over active sets F:
    #   2 A^T(Az - y) + A_F^T mu = 0,  A_F z = b_F
    ata_inv = np.linalg.inv(arr.T @ arr)
    proj = arr @ ata_inv @ arr.T  # (m, m) projector onto range(A)
    best = np.full(nb, np.inf)
    y_free = ys @ proj.T  # unconstrained optimum image = y (already in range)
    feas = np.all(y_free <= bs + 1e-9 * scale, axis=1)
    np.minimum(best, np.where(feas, 0.0, np.inf), out=best)
    for F in _active_subsets(arr, tol):
        idx = list(F)
        wf = proj[np.ix_(idx, idx)]  # A_F (A^T A)^{-1} A_F^T
        try:
            wf_inv = np.linalg.inv(wf)
        except np.linalg.LinAlgError:
            continue
        resid = ys[:, idx] - bs[:, idx]  # A_F z_free - b_F with z_free image y
        mu = resid @ wf_inv.T  # (nb, k)
        az = ys - mu @ proj[idx]  # (nb, m), image of the KKT point
        primal = np.all(az <= bs + 1e-9 * scale, axis=1)
        dual = np.min(mu, axis=1) >= -1e-9
        ok = primal & dual
        d2 = np.sum((az - ys) ** 2, axis=1)
        np.minimum(best, np.where(ok, d2, np.inf), out=best)
    ratios = np.sqrt(best) / denom[use]
    return float(np.max(ratios, initial=0.0)), int(nb)


def cone_sample_check(g, cfg: RngConfig, tol: Tolerances = DEFAULT_TOL):
    """Bracket (min_seen, max_seen) of sqrt(v^T G v) over random nonnegative
    unit vectors; must lie within [cone_min, cone_max] up to slack."""
    gm = as_matrix(g)
    rng = np.random.default_rng(cfg.seed)
    v = np.abs(rng.standard_normal((cfg.sample_count, gm.shape[0])))
    v /= np.linalg.norm(v, axis=1, keepdims=True)
    vals = np.sqrt(np.clip(np.einsum("ij,jk,ik->i", v, gm, v), 0.0, None))
    return float(np.min(vals)), float(np.max(vals))
