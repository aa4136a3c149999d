"""selectrisk: certified rejection thresholds for selective classification.

Given a trained classifier's confidence scores and 0/1 losses on a held-out
set, the calibration procedure finds a rejection threshold whose selective
risk stays below a user-chosen target with probability at least 1 - delta,
certified through exact binomial tail inversion.
"""

from ._kernels import BACKEND, HAS_NUMBA
from .bounds import BoundQuery, BoundResult, binomial_tail, hoeffding_b, solve_b_star
from .confidence import (
    McDropoutRecord,
    PredictionRecord,
    mc_dropout_kappa,
    score_dataset,
    softmax,
    softmax_response,
    topk_loss,
)
from .errors import (
    DataFormatError,
    DegenerateSelectionError,
    DomainError,
    ProbabilityError,
)
from .selective import (
    RiskCoveragePoint,
    ScoredDataset,
    ScoredExample,
    SelectiveMetrics,
    Threshold,
    g_projection,
    risk_coverage_curve,
    select,
    selective_metrics,
)
from .sgr import CalibrationReport, SgrIteration, SgrRequest, evaluate, sgr_calibrate
from .simulate import (
    GuaranteeSummary,
    GuaranteeTrial,
    SyntheticDistribution,
    sample_dataset,
    true_selective_risk,
    validate_guarantee,
)

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "HAS_NUMBA",
    "BoundQuery",
    "BoundResult",
    "binomial_tail",
    "solve_b_star",
    "hoeffding_b",
    "ScoredExample",
    "ScoredDataset",
    "Threshold",
    "SelectiveMetrics",
    "RiskCoveragePoint",
    "select",
    "selective_metrics",
    "g_projection",
    "risk_coverage_curve",
    "PredictionRecord",
    "McDropoutRecord",
    "softmax",
    "softmax_response",
    "mc_dropout_kappa",
    "topk_loss",
    "score_dataset",
    "SgrRequest",
    "SgrIteration",
    "CalibrationReport",
    "sgr_calibrate",
    "evaluate",
    "SyntheticDistribution",
    "GuaranteeTrial",
    "GuaranteeSummary",
    "sample_dataset",
    "true_selective_risk",
    "validate_guarantee",
    "DomainError",
    "ProbabilityError",
    "DataFormatError",
    "DegenerateSelectionError",
]
