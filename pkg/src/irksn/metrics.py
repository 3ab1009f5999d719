"""Support-recovery metrics and path extraction."""

from dataclasses import dataclass, field

import numpy as np

from .exceptions import ParameterError

__all__ = [
    "MetricRow",
    "CSV_COLUMNS",
    "support_of",
    "f1_support",
    "f1_batch",
    "model_error",
    "row_errors",
    "extract_path",
    "format_params",
]

DEFAULT_SUPPORT_TOL = 1e-8
REPARAM_SUPPORT_TOL = 1e-6

CSV_COLUMNS = ("algorithm", "seed", "params", "iter", "f1", "precision", "recall",
               "err2", "sparsity")


def format_params(params):
    """Stable ``key=value;key=value`` rendering used in CSV files."""
    return ";".join(f"{key}={params[key]!r}" for key in sorted(params))


@dataclass
class MetricRow:
    algorithm: str
    hyperparams: dict = field(default_factory=dict)
    seed: int = 0
    iteration: float = 0.0
    f1: float = 0.0
    precision: float = 0.0
    recall: float = 0.0
    err2: float = 0.0
    sparsity: int = 0

    def as_record(self):
        return {"algorithm": self.algorithm, "seed": self.seed,
                "params": format_params(self.hyperparams), "iter": self.iteration,
                "f1": self.f1, "precision": self.precision, "recall": self.recall,
                "err2": self.err2, "sparsity": self.sparsity}


def support_of(w, support_tol=DEFAULT_SUPPORT_TOL):
    """Indices with ``|w_i| > support_tol``."""
    if support_tol < 0:
        raise ParameterError(f"support_tol must be >= 0, got {support_tol}")
    return np.flatnonzero(np.abs(np.asarray(w, dtype=float)) > support_tol)


def f1_support(w_hat, truth, support_tol=DEFAULT_SUPPORT_TOL):
    """``(f1, precision, recall)`` of ``supp(w_hat)`` against the true support.

    An empty predicted support has precision 0 and F1 0.
    """
    true_support = np.asarray(truth.support)
    if true_support.size == 0:
        raise ParameterError("true support must be non-empty")
    predicted = support_of(w_hat, support_tol)
    hits = np.intersect1d(predicted, true_support).size
    precision = hits / predicted.size if predicted.size else 0.0
    recall = hits / true_support.size
    f1 = 2 * precision * recall / (precision + recall) if precision + recall > 0 else 0.0
    return float(f1), float(precision), float(recall)


def f1_batch(coefs, support, support_tol=DEFAULT_SUPPORT_TOL):
    """Row-wise ``(f1, precision, recall, sparsity)`` for a stack of estimates."""
    active = np.abs(np.atleast_2d(coefs)) > support_tol
    sparsity = active.sum(axis=1)
    hits = active[:, support].sum(axis=1)
    precision = np.divide(hits, sparsity, out=np.zeros(len(active)), where=sparsity > 0)
    recall = hits / len(support)
    denom = precision + recall
    f1 = np.divide(2 * precision * recall, denom, out=np.zeros(len(active)), where=denom > 0)
    return f1, precision, recall, sparsity


def row_errors(coefs, w_star):
    """Euclidean distance of every row of ``coefs`` to ``w_star``.

    Blown-up but finite iterates give ``inf`` without a warning.
    """
    with np.errstate(over="ignore", invalid="ignore"):
        return np.linalg.norm(np.atleast_2d(coefs) - w_star, axis=1)


def model_error(w_hat, truth):
    return float(np.linalg.norm(np.asarray(w_hat, dtype=float) - truth.w_star))


def extract_path(run, truth, support_tol=DEFAULT_SUPPORT_TOL, seed=0, hyperparams=None):
    """One :class:`MetricRow` per snapshot of ``run``."""
    if len(run) == 0:
        return []
    params = dict(run.config if hyperparams is None else hyperparams)
    f1, prec, rec, spars = f1_batch(run.coefs, truth.support, support_tol)
    errs = row_errors(run.coefs, truth.w_star)
    return [MetricRow(run.solver, params, seed, float(t), float(f), float(p), float(r),
                      float(e), int(s))
            for t, f, p, r, e, s in zip(run.iterations, f1, prec, rec, errs, spars)]
