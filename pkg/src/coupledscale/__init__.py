"""Scale estimation, entropies and goodness-of-fit for coupled Gaussians."""

from .distribution import (
    CoupledParams,
    GammaMixture,
    cdf,
    escort_index,
    escort_pdf,
    escort_scale,
    log_pdf,
    mixture_of,
    normalization,
    pdf,
    quantile,
    sample,
    sample_mixture,
    sf,
)
from .entropy import (
    EntropyReport,
    average_density,
    average_density_closed_form,
    coupled_entropy,
    shannon_entropy,
    tsallis_entropies,
)
from .errors import ArtifactIOError, CoupledError, DegenerateSampleError, DomainError, NumericError
from .estimators import (
    EstimatorMetrics,
    Method,
    ScaleEstimate,
    estimate_scale,
    estimator_metrics,
    generalized_mean_scale,
    geometric_mean,
    geometric_mean_scale,
    geometric_prefactor,
    scale_identity_check,
)
from .fitting import FitResult, PValueMethod, SearchConfig, cvm_pvalue, cvm_statistic, fit_kappa_sigma
from .sampleset import SampleSet
from .special import coupled_exp, coupled_log, digamma, harmonic_number

__version__ = "0.1.0"

__all__ = [
    "CoupledParams",
    "GammaMixture",
    "cdf",
    "escort_index",
    "escort_pdf",
    "escort_scale",
    "log_pdf",
    "mixture_of",
    "normalization",
    "pdf",
    "quantile",
    "sample",
    "sample_mixture",
    "sf",
    "EntropyReport",
    "average_density",
    "average_density_closed_form",
    "coupled_entropy",
    "shannon_entropy",
    "tsallis_entropies",
    "EstimatorMetrics",
    "Method",
    "ScaleEstimate",
    "estimate_scale",
    "estimator_metrics",
    "generalized_mean_scale",
    "geometric_mean",
    "geometric_mean_scale",
    "geometric_prefactor",
    "scale_identity_check",
    "ArtifactIOError",
    "CoupledError",
    "DegenerateSampleError",
    "DomainError",
    "NumericError",
    "FitResult",
    "PValueMethod",
    "SearchConfig",
    "cvm_pvalue",
    "cvm_statistic",
    "fit_kappa_sigma",
    "SampleSet",
    "coupled_exp",
    "coupled_log",
    "digamma",
    "harmonic_number",
]
