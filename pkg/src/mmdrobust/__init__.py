"""Minimum-MMD parametric estimation, robust to outliers and dependent data.

``BACKEND`` reports which kernel-sum core is active: ``"cython"`` for the
compiled extension, ``"python"`` for the NumPy fallback (forced by setting
``MMDROBUST_PURE_PYTHON=1``).
"""

from ._backend import BACKEND
from .baselines import (coordinatewise_median, em_mixture, geometric_median, mae_density,
                        mean_estimator, median_of_means, sqrt_mse)
from .bounds import BoundReport, report
from .contamination import (CauchyCoordinatewise, ContaminationSpec, Dirac, GaussianShift,
                            contaminate)
from .dependence import IID, BinaryHalfAR, HiddenMarkov, VectorAR, generate, rho_hat
from .errors import (ConfigError, DegenerateDensity, GradientDivergence, MmdRobustError,
                     UnsupportedOperation)
from .estimator import (EstimateResult, EstimatorConfig, exact_gradient_descent_uniform,
                        grad_estimate, grid_search, psga)
from .kernels import Kernel, default_experiment_kernel
from .mmd import MmdValue, closed_form_gauss_mmd2, crit, mmd2_ustat_model_term, mmd2_vstat
from .models import (CauchyLocation, DictionaryMixture, GaussianLocation, ParamSpace,
                     UniformTranslation, project_simplex)

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "BinaryHalfAR", "BoundReport", "CauchyCoordinatewise", "CauchyLocation",
    "ConfigError", "ContaminationSpec", "DegenerateDensity", "Dirac", "DictionaryMixture",
    "EstimateResult", "EstimatorConfig", "GaussianLocation", "GaussianShift",
    "GradientDivergence", "HiddenMarkov", "IID", "Kernel", "MmdRobustError", "MmdValue",
    "ParamSpace", "UniformTranslation", "UnsupportedOperation", "VectorAR",
    "closed_form_gauss_mmd2", "contaminate", "coordinatewise_median", "crit",
    "default_experiment_kernel", "em_mixture", "exact_gradient_descent_uniform", "generate",
    "geometric_median", "grad_estimate", "grid_search", "mae_density", "mean_estimator",
    "median_of_means", "mmd2_ustat_model_term", "mmd2_vstat", "project_simplex", "psga",
    "report", "rho_hat", "sqrt_mse",
]
