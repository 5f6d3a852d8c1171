"""Rigorous sign-volume certification and translation-antisymmetry
certificates for real trigonometric polynomials on flat tori."""

__version__ = "0.1.0"

from .analysis import (
    DistributionEstimate,
    MomentReport,
    OrderTooLarge,
    distribution,
    odd_moment_exact,
    odd_moment_quadrature,
    signed_even_moment,
)
from .certify import (
    CertificationConfig,
    GridCertificate,
    cell_error,
    certify_claim,
    certify_signs,
    paper_config,
    sample_flagged_cells,
)
from .symmetry import (
    CoveringMatrix,
    ExactCheckFailed,
    NotABasis,
    NotInClassS,
    NotT2Eigenfunction,
    ParityObstruction,
    ReductionTrace,
    SemiIntegralSearch,
    TranslationCertificate,
    covering_matrix,
    dyadic_reduce,
    find_class_s_translation,
    find_semi_integral,
    t2_symmetry_theorem,
    verify_antisymmetry,
)
from .trigpoly import (
    PolynomialFormatError,
    SpectralClass,
    Term,
    TrigPolynomial,
    classify,
    evaluate,
    evaluate_many,
    evaluate_with_error,
    gradient_bound,
    parse,
    load,
    t3_counterexample,
)

__all__ = [
    "__version__",
    "CertificationConfig",
    "CoveringMatrix",
    "DistributionEstimate",
    "ExactCheckFailed",
    "GridCertificate",
    "MomentReport",
    "NotABasis",
    "NotInClassS",
    "NotT2Eigenfunction",
    "OrderTooLarge",
    "ParityObstruction",
    "PolynomialFormatError",
    "ReductionTrace",
    "SemiIntegralSearch",
    "SpectralClass",
    "Term",
    "TranslationCertificate",
    "TrigPolynomial",
    "cell_error",
    "certify_claim",
    "certify_signs",
    "classify",
    "covering_matrix",
    "distribution",
    "dyadic_reduce",
    "evaluate",
    "evaluate_many",
    "evaluate_with_error",
    "find_class_s_translation",
    "find_semi_integral",
    "gradient_bound",
    "load",
    "odd_moment_exact",
    "odd_moment_quadrature",
    "paper_config",
    "parse",
    "sample_flagged_cells",
    "signed_even_moment",
    "t2_symmetry_theorem",
    "t3_counterexample",
    "verify_antisymmetry",
]
