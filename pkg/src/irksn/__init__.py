"""Sparse recovery by iterative regularization with the k-support norm.

The core pieces are the k-support norm and the prox of its half square
(:mod:`irksn.ksupport`), the IRKSN solver and its baselines
(:mod:`irksn.solvers`), recovery-condition checks (:mod:`irksn.conditions`)
and the benchmark harness (:mod:`irksn.harness`).
"""

from .conditions import (
    AssumptionViolation,
    ConditionReport,
    GroundTruth,
    Region,
    TheoryBound,
    condition_report,
    theorem1_constants,
)
from .datagen import SyntheticSpec, add_noise, gen_correlated, gen_example1, gen_example2
from .estimators import (
    IHTRegressor,
    IRCRRegressor,
    IRKSNRegressor,
    IROSRRegressor,
    KSNRegressor,
    OMPRegressor,
    SRDIRegressor,
)
from .exceptions import ConfigError, ConvergenceWarning, DivergenceError, ParameterError
from .ksupport import (
    KSupProxParams,
    hard_threshold,
    ksup_norm,
    prox_half_squared_ksup,
    prox_irksn_regularizer,
    topk_norm,
)
from .metrics import MetricRow, extract_path, f1_support, model_error, support_of
from .solvers import IrksnConfig, ProblemInstance, SolverRun, irksn

__version__ = "0.1.0"

__all__ = [
    "AssumptionViolation",
    "ConditionReport",
    "GroundTruth",
    "Region",
    "TheoryBound",
    "condition_report",
    "theorem1_constants",
    "SyntheticSpec",
    "add_noise",
    "gen_correlated",
    "gen_example1",
    "gen_example2",
    "IHTRegressor",
    "IRCRRegressor",
    "IRKSNRegressor",
    "IROSRRegressor",
    "KSNRegressor",
    "OMPRegressor",
    "SRDIRegressor",
    "ConfigError",
    "ConvergenceWarning",
    "DivergenceError",
    "ParameterError",
    "KSupProxParams",
    "hard_threshold",
    "ksup_norm",
    "prox_half_squared_ksup",
    "prox_irksn_regularizer",
    "topk_norm",
    "MetricRow",
    "extract_path",
    "f1_support",
    "model_error",
    "support_of",
    "IrksnConfig",
    "ProblemInstance",
    "SolverRun",
    "irksn",
]
