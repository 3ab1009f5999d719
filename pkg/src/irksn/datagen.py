"""Seeded instance generators.

All randomness comes from ``numpy.random.default_rng(seed)`` (PCG64 with
NumPy's ziggurat normal sampler). Bitwise equality is only promised within
one NumPy version; the statistical contract is what tests check.
"""

from dataclasses import dataclass

import numpy as np

from .conditions import GroundTruth
from .exceptions import ParameterError
from .solvers import ProblemInstance
from .validation import check_iterations, check_positive

__all__ = [
    "SyntheticSpec",
    "EXAMPLE1_W3",
    "EXAMPLE1_W4",
    "EXAMPLE1_WY",
    "gen_correlated",
    "gen_example1",
    "gen_example2",
    "add_noise",
]

EXAMPLE1_W3 = np.array([9 / 11, 6 / 11, 2 / 11])
EXAMPLE1_W4 = np.array([1 / 3, 14 / 15, 2 / 15])
EXAMPLE1_WY = np.array([1.0, 1.0, -4.0])


@dataclass(frozen=True)
class SyntheticSpec:
    n: int
    d: int
    k_true: int
    rho: float = 0.5
    snr: float = 1.0
    seed: int = 0

    def __post_init__(self):
        check_iterations(self.n, name="n")
        check_iterations(self.d, name="d")
        if not 1 <= self.k_true <= self.d:
            raise ParameterError(f"k_true must lie in [1, {self.d}], got {self.k_true}")
        if not 0.0 <= self.rho < 1.0:
            raise ParameterError(f"rho must lie in [0, 1), got {self.rho}")
        check_positive(self.snr, "snr")


def _ground_truth(X, w_star):
    support = np.flatnonzero(w_star)
    return GroundTruth(w_star, support, X @ w_star)


def gen_correlated(spec):
    """Autoregressive Gaussian design with a random sparse model.

    Columns follow ``X_1 ~ N(0, 1)``, ``X_{j+1} = rho X_j + sqrt(1-rho^2) N(0, 1)``
    so that ``E[X_i X_j] = rho^|i-j|``. The noise is rescaled so that
    ``||X w*|| / ||eps|| == snr`` and ``delta`` records ``||eps||``.
    """
    rng = np.random.default_rng(spec.seed)
    n, d = spec.n, spec.d
    sigma = np.sqrt(1.0 - spec.rho ** 2)
    X = np.empty((n, d))
    X[:, 0] = rng.standard_normal(n)
    innovations = rng.standard_normal((n, d - 1))
    for j in range(1, d):
        X[:, j] = spec.rho * X[:, j - 1] + sigma * innovations[:, j - 1]

    support = np.sort(rng.choice(d, size=spec.k_true, replace=False))
    w_star = np.zeros(d)
    w_star[support] = rng.standard_normal(spec.k_true)
    signal = X @ w_star
    eps = rng.standard_normal(n)
    eps *= np.linalg.norm(signal) / (spec.snr * np.linalg.norm(eps))
    instance = ProblemInstance(X, signal + eps, float(np.linalg.norm(eps)))
    return instance, GroundTruth(w_star, support, signal)


def gen_example1(seed=0, max_attempts=100):
    """Five-feature, four-sample design where only the k-support condition holds.

    Columns 0-2 are i.i.d. standard normal, columns 3 and 4 are exact linear
    combinations of them and the target is ``X w`` with ``w = (1, 1, -4, 0, 0)``.
    """
    rng = np.random.default_rng(seed)
    for _ in range(max_attempts):
        base = rng.standard_normal((4, 3))
        if np.linalg.svd(base, compute_uv=False)[-1] > 1e-6:
            break
    else:
        raise RuntimeError(f"no full-rank draw in {max_attempts} attempts")
    X = np.column_stack([base, base @ EXAMPLE1_W3, base @ EXAMPLE1_W4])
    w_star = np.concatenate([EXAMPLE1_WY, [0.0, 0.0]])
    y = base @ EXAMPLE1_WY
    return ProblemInstance(X, y, 0.0), GroundTruth(w_star, np.array([0, 1, 2]), y)


def gen_example2(n, d, k, seed=0, active_off_support=3):
    """Rank-one "activation" design ``x_i = y_i w* + gamma_i``.

    ``w*`` has unit norm on a random support of size ``k``; ``y_i ~ N(0, 1)``;
    each ``gamma_i`` activates ``min(active_off_support, d - k)`` random
    off-support coordinates with ``N(0, 1)`` values. Hence ``X_S = y w*_S^T``.
    """
    check_iterations(n, name="n")
    if not 1 <= k < d:
        raise ParameterError(f"need 1 <= k < d, got k={k}, d={d}")
    rng = np.random.default_rng(seed)
    support = np.sort(rng.choice(d, size=k, replace=False))
    off = np.setdiff1d(np.arange(d), support)
    w_star = np.zeros(d)
    w_star[support] = rng.standard_normal(k)
    w_star /= np.linalg.norm(w_star)

    y = rng.standard_normal(n)
    m = min(active_off_support, off.size)
    gamma = np.zeros((n, d))
    for i in range(n):
        cols = rng.choice(off, size=m, replace=False)
        gamma[i, cols] = rng.standard_normal(m)
    X = np.outer(y, w_star) + gamma
    return ProblemInstance(X, y.copy(), 0.0), GroundTruth(w_star, support, y)


def add_noise(instance, truth, delta, seed=0):
    """Copy of ``instance`` whose target is ``y + eps`` with ``||eps|| = delta``."""
    delta = check_positive(delta, "delta", strict=False)
    if delta == 0.0:
        return ProblemInstance(instance.X.copy(), truth.y_clean.copy(), 0.0)
    rng = np.random.default_rng(seed)
    eps = rng.standard_normal(instance.n)
    eps *= delta / np.linalg.norm(eps)
    return ProblemInstance(instance.X.copy(), truth.y_clean + eps, delta)
