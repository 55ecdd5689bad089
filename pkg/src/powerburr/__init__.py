"""PowerBurr: a six-parameter claim-severity family with fitting and risk tools.

The package provides the transformed Gamma-ratio severity family and its ten
study sub-families (density, CDF, quantile, moments, sampling), maximum
likelihood fitting with analytic gradients and structured multistart,
compound-Poisson reserve estimation by Monte Carlo, a simulation-study
harness, and validation utilities (parametric bootstrap intervals and the
exact binomial back-test).
"""

from .params import (
    BURR_KINDS,
    ConvergenceError,
    DensityPoint,
    DomainError,
    FAMILY_LABELS,
    FAMILY_ORDER,
    FamilyKind,
    FamilySpec,
    FitError,
    NumericError,
    PARAM_NAMES,
    ParamVector,
    UnimodalityCondition,
    UnimodalityVerdict,
    UnsupportedKindError,
)
from .distributions import (
    burr_cdf,
    burr_log_pdf,
    burr_quantile,
    count_density_extrema,
    density_point,
    family_cdf,
    family_log_pdf,
    family_mean_sd,
    family_quantile,
    forward_transform,
    integrate_density,
    inverse_transform,
    moment_is_finite,
    moments,
    powerburr_cdf,
    powerburr_log_pdf,
    powerburr_quantile,
    unimodality_check,
)
from .special_cases import SpecialCase, draw_special_case, special_case_cdf, special_case_params
from .sampling import RngStream, draw_family, draw_gamma_unit_mean, draw_poisson, draw_powerburr
from .claims import ClaimSample, ParseError, ingest
from .fitting import (
    FitResult,
    Gradient,
    LogLikelihood,
    OptimSettings,
    StartSet,
    default_starts,
    fit,
    fit_all,
    gradient,
    loglik,
    moment_start_extended_pareto,
)

__version__ = "0.1.0"
