"""Copula analytics: family catalog, entropy/MI estimators, monotonicity
verifiers, and a reproducible simulation harness."""

from .estimation import (
    AssociationValue,
    EntropyEstimate,
    empirical_entropy,
    entropy_quadrature,
    kendall_sample,
    kl_divergence,
    mutual_information,
    spearman_analytic,
    spearman_sample,
)
from .experiments import (
    ExperimentConfig,
    MonotonicityReport,
    RankedPair,
    SweepReport,
    rank_pairs,
    run_entropy_curve,
    run_size_sweep,
    run_verify,
)
from .families import archimedean_cdf, cdf, conditional_cdf, log_pdf, pdf
from .generators import (
    CompositionMap,
    GeneratorSpec,
    eta_generator,
    generator,
    generator_composition,
    mixture_component,
)
from .models import (
    ALL_FAMILIES,
    ARCHIMEDEAN_FAMILIES,
    BIVARIATE_FAMILIES,
    EPS_CLAMP,
    MULTIVARIATE_FAMILIES,
    ClampWarning,
    ComparisonError,
    ConfigError,
    CopulaLabError,
    CopulaModel,
    CountError,
    DegenerateDataError,
    DomainError,
    GridError,
    NumericError,
    OrderingError,
    ParameterError,
    ShapeError,
    UnsupportedOperationError,
    default_theta_grid,
    model,
)
from .quantiles import QuantileEngine, normal_cdf, normal_quantile, t_cdf, t_quantile
from .sampling import (
    FrailtyLaw,
    SampleMatrix,
    derive_seed,
    frailty_law,
    pseudo_observations,
    sample,
    sample_frailty,
)
from .verification import (
    GridSpec,
    PropertyReport,
    TheoremConditionSummary,
    check_completely_monotone,
    check_kl_chain,
    check_lstar,
    check_mixture_identity,
    check_pqd_order,
    check_supermodular_logdensity,
    check_tp2,
    verify_theorem_conditions,
)

__version__ = "0.1.0"
