"""Exact and limiting joint Laplace transforms, moments, and simulations
for the largest claims of a heavy-tailed portfolio with mixed-Poisson
claim counts."""

from .errors import (DispatchError, DivergenceError, DomainError,
                     NumericalError, UnsupportedError)
from .finite_t import (CountingSpec, LTQuery, component_means, count_pmf,
                       exact_joint_lt, joint_lt_result, pgf_derivative)
from .limit_lt import (REGIME_NAMES, FixedP, FixedS, Regime, VanishingP,
                       lt_eval, normalization_descriptor, numeric_normalizers,
                       regime_from_name)
from .mixing_laws import (Degenerate, Discrete, GammaLaw, MixingLaw, q,
                          theta_mean, theta_moment)
from .moments import (c_coeff, centered_ratio_mean, correlation_r0sq_tinf,
                      max_over_sum_mean, mean_xi_plus_sigma, ratio_moment,
                      ratio_variance, sum_over_max_mean, tinf_mean,
                      tinf_variance)
from .montecarlo import (ConvergenceReport, LePageConfig, TripleSample,
                         convergence_report, empirical_lt,
                         simulate_lepage_triple, simulate_path_triple,
                         simulate_ratio_r, simulate_t_infinity)
from .quadrature import QuadResult, integrate, upper_incomplete_gamma
from .tail_models import TailModel

__version__ = "0.1.0"

__all__ = [
    "CountingSpec", "ConvergenceReport", "Degenerate", "Discrete",
    "DispatchError", "DivergenceError", "DomainError", "FixedP", "FixedS",
    "GammaLaw", "LePageConfig", "LTQuery", "MixingLaw", "NumericalError",
    "QuadResult", "REGIME_NAMES", "Regime", "TailModel", "TripleSample",
    "UnsupportedError", "VanishingP", "c_coeff", "centered_ratio_mean",
    "component_means", "convergence_report", "correlation_r0sq_tinf",
    "count_pmf", "empirical_lt", "exact_joint_lt", "integrate",
    "joint_lt_result", "lt_eval", "max_over_sum_mean", "mean_xi_plus_sigma",
    "normalization_descriptor", "numeric_normalizers", "pgf_derivative", "q",
    "ratio_moment", "ratio_variance", "regime_from_name",
    "simulate_lepage_triple", "simulate_path_triple", "simulate_ratio_r",
    "simulate_t_infinity", "sum_over_max_mean", "theta_mean", "theta_moment",
    "tinf_mean", "tinf_variance", "upper_incomplete_gamma",
    "__version__",
]
