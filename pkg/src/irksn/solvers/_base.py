"""Shared containers for solver inputs and recorded runs."""

from dataclasses import dataclass, field

import numpy as np

from ..exceptions import DivergenceError, ParameterError
from ..validation import check_design, check_positive


@dataclass
class ProblemInstance:
    """Design ``X`` (n, d), noisy target ``y_delta`` (n,) and noise bound ``delta``."""

    X: np.ndarray
    y_delta: np.ndarray
    delta: float = 0.0

    def __post_init__(self):
        self.X, self.y_delta = check_design(self.X, self.y_delta)
        self.delta = check_positive(self.delta, "delta", strict=False)

    @property
    def n(self):
        return self.X.shape[0]

    @property
    def d(self):
        return self.X.shape[1]


@dataclass
class SolverRun:
    """Recorded path of an iterative solver.

    ``coefs[i]`` is the primal estimate after ``iterations[i]`` updates.
    ``extras`` holds solver-specific per-snapshot traces (e.g. the IRKSN
    momentum sequence) and ``config`` echoes the run parameters.
    """

    solver: str
    iterations: np.ndarray
    coefs: np.ndarray
    residual_norms: np.ndarray
    config: dict = field(default_factory=dict)
    extras: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.iterations)

    @property
    def final(self):
        return self.coefs[-1]

    def metrics(self, w_star=None, support_tol=1e-8):
        """Rows ``(t, model_error or None, sparsity, residual_norm)``."""
        rows = []
        for t, w, r in zip(self.iterations, self.coefs, self.residual_norms):
            err = None if w_star is None else float(np.linalg.norm(w - w_star))
            rows.append((int(t), err, int(np.sum(np.abs(w) > support_tol)), float(r)))
        return rows


class _Recorder:
    """Collects snapshots every ``record_every`` iterations."""

    def __init__(self, solver, instance, max_iter, record_every):
        if record_every < 1:
            raise ParameterError(f"record_every must be >= 1, got {record_every}")
        self.solver = solver
        self.instance = instance
        self.record_every = record_every
        n_snap = max_iter // record_every
        self.iterations = np.empty(n_snap, dtype=int)
        self.coefs = np.empty((n_snap, instance.d))
        self.residuals = np.empty(n_snap)
        self.extras = {}
        self._i = 0

    def due(self, t):
        return t % self.record_every == 0

    def record(self, t, w, **extras):
        i = self._i
        self.iterations[i] = t
        self.coefs[i] = w
        with np.errstate(over="ignore", invalid="ignore"):
            # huge but finite iterates of a blowing-up cell give inf here
            self.residuals[i] = np.linalg.norm(self.instance.X @ w - self.instance.y_delta)
        for key, value in extras.items():
            self.extras.setdefault(key, []).append(value)
        self._i += 1

    def finish(self, config):
        extras = {key: np.asarray(v) for key, v in self.extras.items()}
        return SolverRun(self.solver, self.iterations[: self._i],
                         self.coefs[: self._i], self.residuals[: self._i],
                         config=dict(config), extras=extras)


def check_finite(solver, t, *arrays):
    for a in arrays:
        if not np.all(np.isfinite(a)):
            raise DivergenceError(solver, t)
