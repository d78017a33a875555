"""gannet: interpretable additive models with one subnetwork per feature.

Fits E[Y|X] = h^-1(alpha + sum_j f_j(X_j)) where each smooth f_j is a
small feed-forward network trained on partial residuals inside a
backfitting loop, itself wrapped in a local-scoring (IRLS) loop for
non-Gaussian responses. Every f_j is mean-centered over the training
data, so the per-feature partial effects are directly comparable and
exportable.
"""

from .config import FitConfig
from .data import Dataset
from .exceptions import (
    ConfigError,
    DataValidationError,
    DegenerateDataError,
    FormulaError,
    GannetError,
    ModelFileError,
    NumericInstabilityError,
)
from .families import Binomial, Gaussian, make_family
from .formula import Formula, Term, format_formula, parse_formula
from .model import FittedModel, fit, load_model, save_model, summarize
from .simulation import ScenarioSpec, generate_binomial_fixture, generate_scenario

__version__ = "0.1.0"

__all__ = [
    "Binomial",
    "ConfigError",
    "DataValidationError",
    "Dataset",
    "DegenerateDataError",
    "FitConfig",
    "FittedModel",
    "Formula",
    "FormulaError",
    "GannetError",
    "Gaussian",
    "ModelFileError",
    "NumericInstabilityError",
    "ScenarioSpec",
    "Term",
    "fit",
    "format_formula",
    "generate_binomial_fixture",
    "generate_scenario",
    "load_model",
    "make_family",
    "parse_formula",
    "save_model",
    "summarize",
]
