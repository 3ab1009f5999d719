"""k-support norm, its dual top-k norm, hard thresholding and the proximal
operator of the half-squared k-support norm.

The proximal operator follows the breakpoint search of McDonald, Pontil and
Stamos (2016), instantiated for the k-support norm (box parameters a=0, b=1,
c=k). For ``lam > 0`` the minimiser of

    (lam / 2) * ksup_norm(x, k) ** 2 + 0.5 * ||x - w|| ** 2

is ``x_i = theta_i * w_i / (theta_i + lam)`` where
``theta_i = clip(alpha * |w_i| - lam, 0, 1)`` and ``alpha`` solves
``sum(theta) = k``.
"""

from dataclasses import dataclass

import numpy as np

from .exceptions import ParameterError
from .validation import check_open_unit, check_positive, check_sparsity, check_vector

__all__ = [
    "KSupProxParams",
    "ThresholdProfile",
    "topk_norm",
    "hard_threshold",
    "ksup_norm",
    "half_squared_ksup",
    "half_squared_topk",
    "prox_half_squared_ksup",
    "prox_irksn_regularizer",
]


@dataclass(frozen=True)
class KSupProxParams:
    """Sparsity level ``k`` and prox scale ``lam`` of the half-squared prox."""

    k: int
    lam: float

    def __post_init__(self):
        if isinstance(self.k, bool) or not isinstance(self.k, (int, np.integer)) or self.k < 1:
            raise ParameterError(f"k must be a positive integer, got {self.k!r}")
        check_positive(self.lam, "lam", strict=False)

    def check_dimension(self, d):
        check_sparsity(self.k, d)


@dataclass
class ThresholdProfile:
    """Diagnostics of one prox evaluation.

    Attributes
    ----------
    breakpoints : ndarray
        Sorted values ``lam/|w_j|`` and ``(1+lam)/|w_j|`` over nonzero ``w_j``
        (``inf`` where the quotient overflows).
    alpha_star : float
        Root of ``S(alpha) = k`` (or the last breakpoint when fewer than
        ``k`` entries are nonzero).
    theta : ndarray
        Per-coordinate weights in [0, 1].
    """

    breakpoints: np.ndarray
    alpha_star: float
    theta: np.ndarray


def topk_norm(w, k):
    """Euclidean norm of the ``k`` largest-magnitude entries of ``w``."""
    w = check_vector(w)
    k = check_sparsity(k, w.size)
    sq = np.sort(w * w)
    return float(np.sqrt(sq[-k:].sum()))


def hard_threshold(z, k):
    """Keep the ``k`` largest-magnitude entries of ``z`` and zero the rest.

    Ties are broken in favour of the lowest index.

    >>> hard_threshold([2.0, 2.0], 1)
    array([2., 0.])
    """
    z = check_vector(z, "z")
    k = check_sparsity(k, z.size)
    return _hard_threshold(z, k)


def _hard_threshold(z, k):
    keep = np.argsort(-np.abs(z), kind="stable")[:k]
    out = np.zeros_like(z)
    out[keep] = z[keep]
    return out


def ksup_norm(w, k):
    """k-support norm of ``w``.

    Uses the sorted closed form of Argyriou, Foygel and Srebro (2012): with
    ``z`` the magnitudes sorted in decreasing order, find the head length
    ``h`` in ``0..k-1`` such that ``z[h-1] > T/(k-h) >= z[h]`` where
    ``T = sum(z[h:])``; then ``||w||^2 = sum(z[:h]**2) + T**2/(k-h)``.
    """
    w = check_vector(w)
    k = check_sparsity(k, w.size)
    return _ksup_norm(w, k)


def _ksup_norm(w, k):
    z = np.sort(np.abs(w))[::-1]
    if z[0] == 0.0:
        return 0.0
    heads = np.arange(k)
    tails = z.sum() - np.concatenate(([0.0], np.cumsum(z[: k - 1])))
    avg = tails / (k - heads)
    left = np.concatenate(([np.inf], z[: k - 1]))
    # violation of z[h-1] > avg >= z[h]; zero for the valid head length
    violation = np.maximum(avg - left, 0.0) + np.maximum(z[:k] - avg, 0.0)
    exact = np.flatnonzero((left > avg) & (avg >= z[:k]))
    h = int(exact[0]) if exact.size else int(np.argmin(violation))
    value = np.dot(z[:h], z[:h]) + tails[h] ** 2 / (k - h)
    return float(np.sqrt(value))


def half_squared_ksup(w, k):
    return 0.5 * ksup_norm(w, k) ** 2


def half_squared_topk(w, k):
    """Fenchel conjugate of :func:`half_squared_ksup`."""
    return 0.5 * topk_norm(w, k) ** 2


def prox_half_squared_ksup(w, params):
    """Proximal operator of ``(lam/2) * ksup_norm(., k) ** 2``.

    Parameters
    ----------
    w : array-like of shape (d,)
    params : KSupProxParams

    Returns
    -------
    x : ndarray of shape (d,)
    profile : ThresholdProfile
    """
    w = check_vector(w)
    params.check_dimension(w.size)
    return _prox(w, params.k, float(params.lam), with_profile=True)


def prox_irksn_regularizer(u, k, alpha):
    """Prox of ``alpha**-1 * F`` with ``F = (1-alpha)/2 * ksup_norm**2``.

    Reduces to :func:`prox_half_squared_ksup` with ``lam = (1-alpha)/alpha``.
    """
    u = check_vector(u, "u")
    alpha = check_open_unit(alpha)
    k = check_sparsity(k, u.size)
    return _prox(u, k, (1.0 - alpha) / alpha)


def _thresholds(a, k, lam):
    """Weights ``theta`` on positive magnitudes ``a`` and the root ``alpha*``.

    ``theta_j = clip(alpha * a_j - lam, 0, 1)`` only depends on ``alpha * a``,
    so the search runs on ``a / max(a)`` and ``alpha*`` is scaled back.
    Entries below ``tau * max(a)`` would push breakpoints past the float
    range; with ``tau <= lam / (2 (1 + lam))`` they are inactive when at
    least ``k`` entries are larger, and otherwise every larger entry is
    saturated and the small ones form a subproblem with the remaining budget.
    """
    nnz = a.size
    if nnz <= k:
        return np.ones(nnz), (1.0 + lam) / a.min()

    top = a.max()
    # lam = 0 makes x = w; a positive tau only keeps the diagnostics finite
    tau = min(1e-150, 0.5 * lam / (1.0 + lam)) if lam > 0 else 1e-150
    small = a < tau * top
    m = nnz - int(small.sum())
    if m < nnz:
        theta = np.zeros(nnz)
        if m >= k:
            theta[~small], alpha_star = _thresholds(a[~small], k, lam)
        else:
            theta[~small] = 1.0
            theta[small], alpha_star = _thresholds(a[small], k - m, lam)
        return theta, alpha_star
    a = a / top

    desc = np.sort(a)[::-1]
    a_k, a_next = desc[k - 1], desc[k]
    if (1.0 + lam) * a_next <= lam * a_k:
        # S is flat at k between (1+lam)/a_k and lam/a_next: the top k
        # entries are saturated and the rest inactive. Decided from the
        # magnitudes directly since cumulated S values carry rounding of
        # order lam * eps, which matters when lam is large.
        alpha_star = 0.5 * ((1.0 + lam) / a_k + lam / a_next)
        return (a >= a_k).astype(float), alpha_star / top

    # S is nondecreasing and piecewise linear between the breakpoints, with
    # S(bps[0]) = 0 and S(bps[-1]) = nnz > k. Binary search for the last
    # breakpoint with S <= k, evaluating S directly: cumulated slopes cancel
    # inexactly once entries saturate, and the error is amplified by the gaps.
    bps = np.sort(np.concatenate((lam / a, (1.0 + lam) / a)))
    lo, hi = 0, bps.size - 1
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if np.minimum(np.maximum(bps[mid] * a - lam, 0.0), 1.0).sum() <= k:
            lo = mid
        else:
            hi = mid
    # inside the segment the active and saturated sets are fixed and S is
    # linear, so alpha* follows from those directly
    mid = 0.5 * (bps[lo] + bps[hi])
    sat = mid * a >= 1.0 + lam
    act = (mid * a > lam) & ~sat
    if act.any():
        alpha_star = (k - sat.sum() + lam * act.sum()) / a[act].sum()
    else:
        alpha_star = bps[lo]
    theta = np.minimum(np.maximum(alpha_star * a - lam, 0.0), 1.0)
    return theta, alpha_star / top


def _prox(w, k, lam, with_profile=False):
    """Unchecked prox; returns ``x`` or ``(x, profile)``."""
    d = w.size
    absw = np.abs(w)
    nz = absw > 0.0
    if not nz.any():
        x = np.zeros(d)
        if with_profile:
            return x, ThresholdProfile(np.empty(0), 0.0, np.zeros(d))
        return x

    # alpha* itself overflows for subnormal inputs; theta does not
    with np.errstate(over="ignore"):
        theta_nz, alpha_star = _thresholds(absw[nz], k, lam)
    theta = np.zeros(d)
    if theta_nz is None:
        theta_nz = np.minimum(np.maximum(alpha_star * a - lam, 0.0), 1.0)
    theta[nz] = theta_nz
    if lam == 0.0:
        x = w.copy()
    else:
        x = theta * w / (theta + lam)
    if with_profile:
        a = absw[nz]
        with np.errstate(over="ignore", divide="ignore"):
            bps = np.sort(np.concatenate((lam / a, (1.0 + lam) / a)))
        return x, ThresholdProfile(bps, float(alpha_star), theta)
    return x
