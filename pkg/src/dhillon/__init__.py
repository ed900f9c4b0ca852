"""Frequentist and objective-Bayesian inference for the two-parameter
Dhillon lifetime distribution."""

__version__ = "0.1.0"

from .bayes import (McmcChain, McmcConfig, PosteriorSummary, Prior,
                    ValidityReport, check_validity, geweke_z, log_posterior,
                    log_prior, posterior_predictive, run_mh, summarize)
from .compare import (CriteriaRow, SurvivalSeries, compare, criteria,
                      empirical_survival, fit_gamma, fit_weibull)
from .datasets import REGISTRY, Dataset, DatasetRegistry, load_times_csv
from .distribution import (DhillonParams, HazardShape, cdf, hazard,
                           hazard_shape, log_pdf, mean_residual_life,
                           mean_variance, pdf, quantile, raw_moment, sample,
                           survival)
from .errors import (DegenerateData, DegenerateSeries, DhillonError,
                     DomainError, EmptyChain, EmptyInput, ImproperPosterior,
                     InputError, MaxIterExceeded, MomentDoesNotExist,
                     MrlUndefined, NoBracket, NotConverged)
from .mle import (FisherInfo, MleFit, MomEstimate, fisher_info, fit_mle,
                  fit_mom, log_likelihood, score)
from .numerics import (QuadResult, RootConfig, find_root, incomplete_beta,
                       integrate, normal_quantile, tail_product_integral)
from .simstudy import SimReport, SimRow, SimScenario, bias_mse, run_scenario

__all__ = [
    "__version__",
    "DhillonParams", "HazardShape", "Dataset", "DatasetRegistry", "REGISTRY",
    "pdf", "log_pdf", "survival", "cdf", "hazard", "hazard_shape", "quantile",
    "sample", "raw_moment", "mean_variance", "mean_residual_life",
    "FisherInfo", "MleFit", "MomEstimate", "log_likelihood", "score",
    "fisher_info", "fit_mle", "fit_mom",
    "Prior", "McmcConfig", "McmcChain", "PosteriorSummary", "ValidityReport",
    "log_prior", "log_posterior", "check_validity", "run_mh", "geweke_z",
    "summarize", "posterior_predictive",
    "CriteriaRow", "SurvivalSeries", "criteria", "compare", "fit_weibull",
    "fit_gamma", "empirical_survival",
    "SimScenario", "SimReport", "SimRow", "run_scenario", "bias_mse",
    "RootConfig", "QuadResult", "find_root", "integrate", "incomplete_beta",
    "tail_product_integral", "normal_quantile",
    "load_times_csv",
    "DhillonError", "DomainError", "InputError", "NoBracket",
    "MaxIterExceeded", "NotConverged", "MomentDoesNotExist", "MrlUndefined",
    "DegenerateData", "ImproperPosterior", "DegenerateSeries", "EmptyChain",
    "EmptyInput",
]
