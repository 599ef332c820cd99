"""Accessible information of two-state qubit ensembles.

Library layout:

- :mod:`qaccess.qstate` - state pairs, validation, real-basis reduction
- :mod:`qaccess.measure` - POVMs, joint distributions, mutual information
- :mod:`qaccess.stationary` - stationarity conditions and the function f
- :mod:`qaccess.polycert` - exact polynomial engine, discriminant certificate
- :mod:`qaccess.optimizer` - measurement optimization, conjecture verifier
- :mod:`qaccess.cli` - command-line interface (``qaccess``)
"""

from .measure import (
    JointDistribution,
    Povm,
    Rank1Povm,
    accessible_information_report,
    is_von_neumann,
    joint_distribution,
    mutual_information,
)
from .optimizer import (
    TrinePovmParam,
    VerificationReport,
    VonNeumannParam,
    optimize_trine,
    optimize_von_neumann,
    random_density_pair,
    verify_conjecture,
)
from .polycert import (
    CertificateViolation,
    DiscriminantCertificate,
    FitFailure,
    GridSpec,
    Polynomial,
    certify_domain,
    closed_form_discriminant,
    discriminant,
    real_roots,
    resultant,
    sturm_count,
    y_coefficients,
)
from .qstate import (
    ComplexDensityPair,
    DensityPair,
    is_pure,
    parse_state_pair,
    to_real_basis,
    validate_pair,
)
from .stationary import (
    BoundaryDistribution,
    FRootCount,
    PureStateDomain,
    QuadraticTriple,
    StationaryParams,
    build_P,
    canonicalize,
    count_roots_of_f,
    eval_f,
    eval_f_derivatives,
    extract_params,
    random_params,
    stationarity_residual,
)

__version__ = "0.1.0"

__all__ = [
    "BoundaryDistribution",
    "CertificateViolation",
    "ComplexDensityPair",
    "DensityPair",
    "DiscriminantCertificate",
    "FRootCount",
    "FitFailure",
    "GridSpec",
    "JointDistribution",
    "Polynomial",
    "Povm",
    "PureStateDomain",
    "QuadraticTriple",
    "Rank1Povm",
    "StationaryParams",
    "TrinePovmParam",
    "VerificationReport",
    "VonNeumannParam",
    "accessible_information_report",
    "build_P",
    "canonicalize",
    "certify_domain",
    "closed_form_discriminant",
    "count_roots_of_f",
    "discriminant",
    "eval_f",
    "eval_f_derivatives",
    "extract_params",
    "is_pure",
    "is_von_neumann",
    "joint_distribution",
    "mutual_information",
    "optimize_trine",
    "optimize_von_neumann",
    "parse_state_pair",
    "random_density_pair",
    "random_params",
    "real_roots",
    "resultant",
    "stationarity_residual",
    "sturm_count",
    "to_real_basis",
    "validate_pair",
    "verify_conjecture",
    "y_coefficients",
]
