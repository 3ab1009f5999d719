"""IRKSN and the baseline sparse-recovery solvers."""

from ._base import ProblemInstance, SolverRun
from .greedy import iht, omp
from .implicit import ircr, ircr_step_sizes, irosr, srdi
from .irksn import IrksnConfig, SolverState, irksn
from .penalized import (
    ENET_L1_RATIOS,
    default_lambda_grid,
    elasticnet_path,
    ksn_objective,
    ksn_penalized,
    lasso_path,
)

__all__ = [
    "ProblemInstance",
    "SolverRun",
    "IrksnConfig",
    "SolverState",
    "irksn",
    "iht",
    "omp",
    "lasso_path",
    "elasticnet_path",
    "default_lambda_grid",
    "ENET_L1_RATIOS",
    "ksn_penalized",
    "ksn_objective",
    "srdi",
    "irosr",
    "ircr",
    "ircr_step_sizes",
]
