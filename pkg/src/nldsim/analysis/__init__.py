from nldsim.analysis.bounds import (
    BonferroniTerms,
    CountBudgetError,
    DmtCurve,
    DmtKind,
    ball_probability,
    bonferroni_lower_bound,
    bonferroni_positive_threshold,
    bonferroni_terms,
    count_primitive_vectors,
    dmt_reference,
    fit_envelope_constant,
    gaussian_ball_bounds,
    primitive_shell_counts,
    upper_bound_lemma2,
)
from nldsim.analysis.montecarlo import (
    conditional_nld_error,
    estimate_ser,
    estimate_short_vector_prob,
    estimate_sigma_tail,
    ser_sweep,
    short_vector_curve,
    short_vector_distances,
    sigma_min_curve,
)
from nldsim.analysis.stats import (
    RARE_EVENT_FLOOR,
    EstimateWithCI,
    GapPoint,
    InsufficientDataError,
    SlopeFit,
    clopper_pearson,
    diversity_slope,
    fit_loglog_slope,
    gap_analysis,
)

__all__ = [
    "BonferroniTerms",
    "CountBudgetError",
    "DmtCurve",
    "DmtKind",
    "EstimateWithCI",
    "GapPoint",
    "InsufficientDataError",
    "RARE_EVENT_FLOOR",
    "SlopeFit",
    "ball_probability",
    "bonferroni_lower_bound",
    "bonferroni_positive_threshold",
    "bonferroni_terms",
    "clopper_pearson",
    "conditional_nld_error",
    "count_primitive_vectors",
    "diversity_slope",
    "dmt_reference",
    "estimate_ser",
    "estimate_short_vector_prob",
    "estimate_sigma_tail",
    "fit_envelope_constant",
    "fit_loglog_slope",
    "gap_analysis",
    "gaussian_ball_bounds",
    "primitive_shell_counts",
    "ser_sweep",
    "short_vector_curve",
    "short_vector_distances",
    "sigma_min_curve",
    "upper_bound_lemma2",
]
