"""Model selection by mutation validation, compared against
cross-validation under a paired nested design, with Bayesian ROPE
tests and runtime/CO2 accounting."""

__version__ = "0.1.0"

from .bayes import (
    DIFF_CONVENTION,
    CorrelatedTModel,
    PosteriorTriple,
    RopeInterval,
    correlated_ttest,
    hierarchical_test,
    student_t_cdf,
)
from .data import (
    Dataset,
    FeatureScoreTable,
    FoldPlan,
    MutationPlan,
    anova_f_scores,
    load_csv,
    make_fold_plan,
    make_synthetic,
    mutate_labels,
    select_k_best,
)
from .harness import (
    ExperimentConfig,
    PairedComparisonResult,
    ResourceModel,
    ResourceReport,
    run_paired_comparison,
)
from .learners import (
    CandidateModel,
    FittedModel,
    accuracy,
    fit_candidate,
    poly_kernel,
    predict,
)
from .selection import (
    CvStrategy,
    MvScoreRecord,
    MvStrategy,
    SelectionOutcome,
    cv_score,
    m_score,
    mv_score,
    select_model,
)

__all__ = [
    "__version__",
    "DIFF_CONVENTION",
    "CorrelatedTModel",
    "PosteriorTriple",
    "RopeInterval",
    "correlated_ttest",
    "hierarchical_test",
    "student_t_cdf",
    "Dataset",
    "FeatureScoreTable",
    "FoldPlan",
    "MutationPlan",
    "anova_f_scores",
    "load_csv",
    "make_fold_plan",
    "make_synthetic",
    "mutate_labels",
    "select_k_best",
    "ExperimentConfig",
    "PairedComparisonResult",
    "ResourceModel",
    "ResourceReport",
    "run_paired_comparison",
    "CandidateModel",
    "FittedModel",
    "accuracy",
    "fit_candidate",
    "poly_kernel",
    "predict",
    "CvStrategy",
    "MvScoreRecord",
    "MvStrategy",
    "SelectionOutcome",
    "cv_score",
    "m_score",
    "mv_score",
    "select_model",
]
