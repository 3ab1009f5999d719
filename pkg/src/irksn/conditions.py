"""Recovery conditions and the early-stopping bound constants.

Notation: ``S`` is the true support, ``X_S`` the matching columns and ``x_j``
column ``j``. Three conditions are checked numerically:

* minimum-norm feasibility: ``X w* = y`` and ``w*_S = pinv(X_S) y``;
* the k-support condition:
  ``max_{l not in S} |<pinv(X_S) x_l, w*_S>| < min_{j in S} |<pinv(X_S) x_j, w*_S>|``;
* the l1 condition: ``X_S`` injective and
  ``max_{l not in S} |<pinv(X_S) x_l, sgn(w*_S)>| < 1``.
"""

import enum
import math
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np

from .exceptions import ParameterError
from .validation import check_positive, operator_norm

__all__ = [
    "GroundTruth",
    "ConditionReport",
    "TheoryBound",
    "Region",
    "AssumptionViolation",
    "pseudo_inverse",
    "check_assumption1",
    "check_assumption2",
    "check_assumption3_l1",
    "admissible_alpha_max",
    "theorem1_constants",
    "classify_region",
    "condition_report",
]

RCOND = 1e-10
INJECTIVE_RTOL = 1e-8
FEASIBILITY_TOL = 1e-8
STRICT_TOL = 1e-12


class AssumptionViolation(ParameterError):
    """An instance does not meet a condition required by the caller."""


class Region(str, enum.Enum):
    OURS_ONLY = "ours_only"
    L1_AND_OURS = "l1_and_ours"
    L1_ONLY = "l1_only"
    NEITHER = "neither"


@dataclass
class GroundTruth:
    w_star: np.ndarray
    support: np.ndarray
    y_clean: np.ndarray

    def __post_init__(self):
        self.w_star = np.asarray(self.w_star, dtype=float)
        self.support = np.asarray(self.support, dtype=int)
        self.y_clean = np.asarray(self.y_clean, dtype=float)
        if self.support.size == 0:
            raise ParameterError("support must be non-empty")

    @property
    def k(self):
        return int(self.support.size)

    @property
    def off_support(self):
        return np.setdiff1d(np.arange(self.w_star.size), self.support)


@dataclass
class ConditionReport:
    l1_condition_value: Optional[float] = None
    ours_lhs: Optional[float] = None
    ours_rhs: Optional[float] = None
    xs_injective: Optional[bool] = None
    min_norm_holds: Optional[bool] = None
    eta: Optional[float] = None
    alpha_max: Optional[float] = None
    region: Optional[Region] = None
    a2_status: Optional[str] = None
    a3_status: Optional[str] = None
    notes: list = field(default_factory=list)

    @property
    def a2_holds(self):
        return self.a2_status == "holds"

    @property
    def a3_holds(self):
        return bool(self.xs_injective) and self.a3_status == "holds"

    def as_dict(self):
        out = asdict(self)
        out["region"] = None if self.region is None else self.region.value
        out["notes"] = "; ".join(self.notes)
        return out


@dataclass
class TheoryBound:
    """Constants of ``||w_t - w*|| <= a t delta + b / t`` (t >= 2)."""

    a: float
    b: float
    c: float
    t_delta: Optional[int]
    norm: str = "spectral"

    def value(self, t, delta):
        return self.a * t * delta + self.b / t

    def stopping_time(self):
        """``t_delta`` clipped to 2, the smallest ``t`` the bound covers."""
        return None if self.t_delta is None else max(2, self.t_delta)

    def stopping_bound(self, delta):
        """``(a (c + 1) + b / c) sqrt(delta)``, the bound at ``t_delta``."""
        return (self.a * (self.c + 1.0) + self.b / self.c) * math.sqrt(delta)


def pseudo_inverse(M, rcond=RCOND):
    """Moore-Penrose inverse; singular values below ``rcond * s_max`` are dropped."""
    M = np.asarray(M, dtype=float)
    if not 0.0 < rcond < 1.0:
        raise ParameterError(f"rcond must lie in (0, 1), got {rcond}")
    U, s, Vt = np.linalg.svd(M, full_matrices=False)
    if s.size == 0 or s[0] == 0.0:
        return np.zeros(M.T.shape)
    inv = np.where(s > rcond * s[0], 1.0 / np.where(s > 0, s, 1.0), 0.0)
    return (Vt.T * inv) @ U.T


def _strict_status(lhs, rhs):
    gap = rhs - lhs
    if abs(gap) <= STRICT_TOL:
        return "boundary"
    return "holds" if gap > 0 else "fails"


def _check_pair(instance, truth):
    if truth.w_star.size != instance.d or truth.y_clean.size != instance.n:
        raise ParameterError("ground truth dimensions do not match the design")
    if truth.support.min() < 0 or truth.support.max() >= instance.d:
        raise ParameterError("support index out of range")


def _restricted(instance, truth):
    X = instance.X
    _check_pair(instance, truth)
    S = truth.support
    XS = X[:, S]
    # column j is pinv(X_S) x_j
    return XS, pseudo_inverse(XS) @ X


def check_assumption1(instance, truth, tol=FEASIBILITY_TOL):
    """Minimum-norm feasibility of ``w*`` on its support."""
    _check_pair(instance, truth)
    XS = instance.X[:, truth.support]
    wS = truth.w_star[truth.support]
    y = truth.y_clean
    feasible = np.linalg.norm(XS @ wS - y) <= tol * np.linalg.norm(y)
    min_norm = np.linalg.norm(wS - pseudo_inverse(XS) @ y) <= tol * max(1.0, np.linalg.norm(wS))
    outside = truth.off_support
    exact_support = not np.any(truth.w_star[outside])
    return bool(feasible and min_norm and exact_support)


def check_assumption2(instance, truth, report=None):
    """Fill ``ours_lhs``/``ours_rhs`` and the status of the k-support condition."""
    report = ConditionReport() if report is None else report
    _, A = _restricted(instance, truth)
    inner = np.abs(truth.w_star[truth.support] @ A)
    off = truth.off_support
    report.ours_lhs = float(inner[off].max()) if off.size else 0.0
    report.ours_rhs = float(inner[truth.support].min())
    report.a2_status = _strict_status(report.ours_lhs, report.ours_rhs)
    return report


def check_assumption3_l1(instance, truth, report=None):
    """Fill ``l1_condition_value``/``xs_injective`` and the l1 condition status."""
    report = ConditionReport() if report is None else report
    XS, A = _restricted(instance, truth)
    signs = np.sign(truth.w_star[truth.support])
    off = truth.off_support
    report.l1_condition_value = float(np.abs(signs @ A[:, off]).max()) if off.size else 0.0
    s = np.linalg.svd(XS, compute_uv=False)
    report.xs_injective = bool(XS.shape[0] >= XS.shape[1] and s[-1] > INJECTIVE_RTOL * s[0])
    feasible = np.linalg.norm(instance.X @ truth.w_star - truth.y_clean) <= (
        FEASIBILITY_TOL * np.linalg.norm(truth.y_clean))
    status = _strict_status(report.l1_condition_value, 1.0)
    report.a3_status = status if feasible else "fails"
    return report


def _theorem_margin(instance, truth):
    XS = instance.X[:, truth.support]
    # (X_S X_S^T)^+ = (X_S^T)^+ X_S^+, which avoids an n x n decomposition
    pinv = pseudo_inverse(XS)
    dual = pinv.T @ (pinv @ truth.y_clean)
    inner = np.abs(instance.X.T @ dual)
    off = truth.off_support
    lhs = float(inner[off].max()) if off.size else 0.0
    return float(inner[truth.support].min()) - lhs


def admissible_alpha_max(instance, truth):
    """Check feasibility and the k-support condition, return the report.

    The report has ``eta`` and ``alpha_max = eta / ||w*||_inf`` filled.

    Raises
    ------
    AssumptionViolation
        Naming the failing condition.
    """
    report = check_assumption2(instance, truth)
    report.min_norm_holds = check_assumption1(instance, truth)
    if not report.min_norm_holds:
        raise AssumptionViolation("minimum-norm feasibility (assumption 1) fails")
    report.eta = _theorem_margin(instance, truth)
    if not report.a2_holds or report.eta <= 0:
        raise AssumptionViolation(
            f"k-support condition (assumption 2) fails: lhs={report.ours_lhs!r}, "
            f"rhs={report.ours_rhs!r}, eta={report.eta!r}")
    report.alpha_max = report.eta / float(np.abs(truth.w_star).max())
    return report


def theorem1_constants(instance, truth, alpha, c=1.0, norm="spectral"):
    """Constants ``a``, ``b``, ``t_delta`` and the margin ``eta``.

    Returns
    -------
    bound : TheoryBound
    report : ConditionReport
        With ``eta`` and ``alpha_max = eta / ||w*||_inf`` filled.

    Raises
    ------
    AssumptionViolation
        If feasibility or the k-support condition fails, or ``alpha`` is not
        below ``alpha_max``.
    """
    c = check_positive(c, "c")
    report = admissible_alpha_max(instance, truth)
    if not 0.0 < alpha < report.alpha_max:
        raise AssumptionViolation(
            f"alpha={alpha!r} must lie in (0, alpha_max={report.alpha_max!r})")

    op = operator_norm(instance.X, norm)
    XS = instance.X[:, truth.support]
    dual_norm = np.linalg.norm(pseudo_inverse(XS.T) @ truth.w_star[truth.support])
    delta = instance.delta
    t_delta = math.ceil(c / math.sqrt(delta)) if delta > 0 else None
    bound = TheoryBound(a=4.0 / op, b=2.0 * op * dual_norm / alpha, c=c,
                        t_delta=t_delta, norm=norm)
    return bound, report


def classify_region(report):
    if report.a2_holds and report.a3_holds:
        return Region.L1_AND_OURS
    if report.a2_holds:
        return Region.OURS_ONLY
    if report.a3_holds:
        return Region.L1_ONLY
    return Region.NEITHER


def condition_report(instance, truth):
    """Run every check and return a complete :class:`ConditionReport`."""
    report = ConditionReport()
    report.min_norm_holds = check_assumption1(instance, truth)
    check_assumption2(instance, truth, report)
    check_assumption3_l1(instance, truth, report)
    report.eta = _theorem_margin(instance, truth)
    if report.eta > 0:
        report.alpha_max = report.eta / float(np.abs(truth.w_star).max())
    else:
        report.notes.append("eta <= 0: no admissible alpha")
    if not report.min_norm_holds:
        report.notes.append("assumption 1 fails: eta is not tied to assumption 2")
    report.region = classify_region(report)
    return report
