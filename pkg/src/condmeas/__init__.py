"""condmeas: exact condition measures of small dense matrices.

Computes chi, chibar, the Hoffman constants, the Renegar distance and the
Grassmannian condition number by finite enumeration, verifies the identities
relating them, and cross-checks everything against Monte Carlo oracles.
"""

from .coneig import ConeTable, SupportCertificate, cone_candidates, cone_max, cone_min
from .errors import (
    CondmeasError,
    EnumerationCapError,
    InfeasibleError,
    MatrixParseError,
    NotPSDError,
    NotStrictlyFeasibleError,
    NotSymmetricError,
    RankDeficientError,
    ShapeError,
    SingularMatrixError,
    ZeroMatrixError,
)
from .linalg import DEFAULT_TOL, Tolerances
from .measures import (
    MeasureResult,
    chi,
    chibar,
    grassmann,
    hoffman,
    hoffman_simple,
    hoffmanbar,
    renegar_distance,
    wls_pseudoinverse,
)
from .oracle import (
    RngConfig,
    cone_sample_check,
    constrained_lsq,
    directed_chi_witness,
    hoffman_ratio_sample,
    hoffmanbar_ratio_sample,
    sample_chi_lower,
    sample_chibar_lower,
)
from .signed import (
    FeasibilityResult,
    SignedScan,
    VerificationReport,
    apply_signature,
    enumerate_signatures,
    signed_max_hoffman,
    strictly_feasible,
    verify_identities,
)

__version__ = "0.1.0"

__all__ = [
    "ConeTable",
    "SupportCertificate",
    "cone_candidates",
    "cone_max",
    "cone_min",
    "CondmeasError",
    "EnumerationCapError",
    "InfeasibleError",
    "MatrixParseError",
    "NotPSDError",
    "NotStrictlyFeasibleError",
    "NotSymmetricError",
    "RankDeficientError",
    "ShapeError",
    "SingularMatrixError",
    "ZeroMatrixError",
    "DEFAULT_TOL",
    "Tolerances",
    "MeasureResult",
    "chi",
    "chibar",
    "grassmann",
    "hoffman",
    "hoffman_simple",
    "hoffmanbar",
    "renegar_distance",
    "wls_pseudoinverse",
    "RngConfig",
    "cone_sample_check",
    "constrained_lsq",
    "directed_chi_witness",
    "hoffman_ratio_sample",
    "hoffmanbar_ratio_sample",
    "sample_chi_lower",
    "sample_chibar_lower",
    "FeasibilityResult",
    "SignedScan",
    "VerificationReport",
    "apply_signature",
    "enumerate_signatures",
    "signed_max_hoffman",
    "strictly_feasible",
    "verify_identities",
    "__version__",
]
