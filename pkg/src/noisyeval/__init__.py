"""Success-rate estimation from mixed human and noisy-metric ratings.

The package estimates the probability alpha that a text generator produces
an adequate output, from any mix of error-free (human) binary ratings and
error-prone automatic-metric ratings whose error rates (rho, eta) are
known, or themselves estimated from gold-labeled data. On top of the
posterior it provides pairwise significance tests and campaign planning
(how many ratings of which kind buy which resolution), plus threshold
selection for turning scalar metric scores into binary ones.
"""

from .binarize import (
    RocPoint,
    ScoredSample,
    ThresholdBinarizer,
    binarize_scores,
    rho_eta_at_threshold,
    roc_points,
    roc_to_csv,
    select_threshold,
    select_threshold_by_system,
)
from .distributions import (
    BetaParams,
    DiscretizedDist,
    GridConfig,
    beta_cdf,
    discretize,
    log_binom_pmf,
    moments,
    normal_quantile,
)
from .estimation import (
    AlphaEstimator,
    AlphaPosterior,
    CountSummary,
    MetricPerformance,
    estimate_error_free,
    estimate_known_rho_eta,
    estimate_rho_eta,
    fuse_metrics,
    posterior_marginal,
    posterior_mixed,
)
from .exceptions import (
    ContractViolationError,
    DataError,
    DomainError,
    DuplicateKeyError,
    LowEvidenceWarning,
    NoisyEvalError,
    NotFittedError,
    NumericError,
    OverlapWarning,
    ParseError,
    SchemaError,
    UndefinedEstimatorError,
)
from .ingest import (
    DatasetSummary,
    HUMAN_SOURCE,
    RatingRecord,
    load_comparison_result,
    load_count_summary,
    load_ratings,
    load_scored_samples,
    save_report,
    summarize,
    summarize_dataset,
)
from .planner import (
    PLAN_DISCLAIMER,
    MinSamplesResult,
    PlanParams,
    SimulatedCounts,
    epsilon_curve,
    epsilon_sim,
    format_table,
    min_samples,
    plan_table,
    simulate_counts,
    table_to_csv,
)
from .significance import (
    ComparisonResult,
    compare_systems,
    epsilon_gamma,
    is_significant,
    prob_greater,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # distributions
    "BetaParams",
    "DiscretizedDist",
    "GridConfig",
    "beta_cdf",
    "discretize",
    "log_binom_pmf",
    "moments",
    "normal_quantile",
    # estimation
    "AlphaEstimator",
    "AlphaPosterior",
    "CountSummary",
    "MetricPerformance",
    "estimate_error_free",
    "estimate_known_rho_eta",
    "estimate_rho_eta",
    "fuse_metrics",
    "posterior_marginal",
    "posterior_mixed",
    # significance
    "ComparisonResult",
    "compare_systems",
    "epsilon_gamma",
    "is_significant",
    "prob_greater",
    # planner
    "PLAN_DISCLAIMER",
    "MinSamplesResult",
    "PlanParams",
    "SimulatedCounts",
    "epsilon_curve",
    "epsilon_sim",
    "format_table",
    "table_to_csv",
    "min_samples",
    "plan_table",
    "simulate_counts",
    # binarize
    "RocPoint",
    "ScoredSample",
    "ThresholdBinarizer",
    "binarize_scores",
    "rho_eta_at_threshold",
    "roc_points",
    "roc_to_csv",
    "select_threshold",
    "select_threshold_by_system",
    # ingest
    "DatasetSummary",
    "HUMAN_SOURCE",
    "RatingRecord",
    "load_comparison_result",
    "load_count_summary",
    "load_ratings",
    "load_scored_samples",
    "save_report",
    "summarize",
    "summarize_dataset",
    # errors and warnings
    "NoisyEvalError",
    "DomainError",
    "ContractViolationError",
    "NumericError",
    "UndefinedEstimatorError",
    "DataError",
    "ParseError",
    "DuplicateKeyError",
    "SchemaError",
    "NotFittedError",
    "LowEvidenceWarning",
    "OverlapWarning",
]
