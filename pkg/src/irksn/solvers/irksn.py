"""IRKSN: accelerated dual gradient descent on the constrained problem

    min_w  F(w) + (alpha/2) ||w||^2   s.t.  X w = y_delta,
    F(w) = (1 - alpha)/2 * ksup_norm(w, k)^2,

stopped early. One iteration, with ``prox = prox_{F/alpha}``::

    r_t     = prox(-X^T v_t / alpha)
    z_t     = v_t + gamma * (X r_t - y_delta)
    theta'  = (1 + sqrt(1 + 4 theta^2)) / 2
    v_{t+1} = z_t + (theta - 1)/theta' * (z_t - z_{t-1})
    w_t     = prox(-X^T z_t / alpha)

Dual variables live in R^n and start at zero; ``gamma`` defaults to
``alpha / ||X||^2``.
"""

from dataclasses import asdict, dataclass
from typing import Optional

import numpy as np

from ..exceptions import ParameterError
from ..ksupport import _prox
from ..validation import check_iterations, check_open_unit, check_sparsity, operator_norm
from ._base import ProblemInstance, _Recorder, check_finite


@dataclass
class IrksnConfig:
    k: int
    alpha: float
    gamma: Optional[float] = None
    max_iter: int = 2000
    record_every: int = 1
    norm: str = "spectral"

    def __post_init__(self):
        check_open_unit(self.alpha)
        check_iterations(self.max_iter, minimum=2)
        check_iterations(self.record_every, minimum=1, name="record_every")
        if self.gamma is not None and not self.gamma > 0:
            raise ParameterError(f"gamma must be > 0, got {self.gamma}")
        if self.norm not in ("spectral", "nuclear"):
            raise ParameterError(f"norm must be 'spectral' or 'nuclear', got {self.norm!r}")

    def step_size(self, X):
        if self.gamma is not None:
            return float(self.gamma)
        return self.alpha / operator_norm(X, self.norm) ** 2


@dataclass
class SolverState:
    w_hat: np.ndarray
    v_hat: np.ndarray
    z_hat: np.ndarray
    z_prev: np.ndarray
    theta: float = 1.0
    t: int = 0


def irksn(instance, config):
    """Run IRKSN and return the recorded :class:`SolverRun`.

    The momentum sequence is stored in ``run.extras["theta"]`` (value of
    ``theta_t`` used at each recorded iteration).
    """
    if not isinstance(instance, ProblemInstance):
        raise ParameterError("instance must be a ProblemInstance")
    X, y = instance.X, instance.y_delta
    k = check_sparsity(config.k, instance.d)
    alpha = config.alpha
    lam = (1.0 - alpha) / alpha
    gamma = config.step_size(X)

    n = instance.n
    state = SolverState(np.zeros(instance.d), np.zeros(n), np.zeros(n), np.zeros(n))
    rec = _Recorder("irksn", instance, config.max_iter, config.record_every)
    Xt = X.T
    with np.errstate(over="ignore", invalid="ignore"):
        for t in range(1, config.max_iter + 1):
            r = _prox(-(Xt @ state.v_hat) / alpha, k, lam)
            z_new = state.v_hat + gamma * (X @ r - y)
            theta_next = 0.5 * (1.0 + np.sqrt(1.0 + 4.0 * state.theta ** 2))
            v_next = z_new + ((state.theta - 1.0) / theta_next) * (z_new - state.z_hat)
            check_finite("irksn", t, z_new, v_next)
            state.z_prev, state.z_hat, state.v_hat = state.z_hat, z_new, v_next
            theta_used, state.theta, state.t = state.theta, theta_next, t
            if rec.due(t):
                state.w_hat = _prox(-(Xt @ state.z_hat) / alpha, k, lam)
                rec.record(t, state.w_hat, theta=theta_used, theta_next=theta_next)

    cfg = asdict(config)
    cfg["gamma"] = gamma
    return rec.finish(cfg)
