"""Closed-form accuracy guarantees for the offline estimators, plus the
feasible alarm-threshold range and accuracy width for the online detector.

All logarithms are natural.  Bounds are returned uncapped even when they
exceed the sample size; callers doing empirical comparisons cap at n
themselves.  Inputs: A is the noise-calibration constant (ratio spread or
tail constant), C the smaller KL divergence between the hypotheses, C_M the
smaller divergence from either hypothesis to their equal mixture.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .errors import InvalidParameterError
from .hypotheses import LOG2


class BoundKind(enum.Enum):
    MLE_BOUNDED = "mle-bounded"
    PRIVATE_BOUNDED = "private-bounded"
    MLE_RELAXED = "mle-relaxed"
    PRIVATE_RELAXED = "private-relaxed"
    ONLINE = "online"


@dataclass(frozen=True)
class AccuracyBound:
    """An alpha value together with the inputs that produced it."""

    alpha: float
    which: BoundKind
    a: float
    c_or_cm: float
    beta: float
    epsilon: float


@dataclass(frozen=True)
class ThresholdRange:
    t_low: float
    t_high: float

    @property
    def feasible(self) -> bool:
        return self.t_low <= self.t_high


def _require_pos(name: str, value: float) -> None:
    if math.isnan(value) or value <= 0.0:
        raise InvalidParameterError(f"{name} must be positive, got {value!r}")


def _require_finite_pos(name: str, value: float) -> None:
    _require_pos(name, value)
    if math.isinf(value):
        raise InvalidParameterError(f"{name} must be finite, got {value!r}")


def _require_beta(beta: float) -> None:
    if not 0.0 < beta < 1.0:
        raise InvalidParameterError(f"beta must lie in (0, 1), got {beta!r}")


def _require_eps(epsilon: float) -> None:
    if math.isnan(epsilon) or epsilon <= 0.0:
        raise InvalidParameterError(f"epsilon must be positive (inf allowed), got {epsilon!r}")


def _require_cm(c_m: float) -> None:
    _require_finite_pos("C_M", c_m)
    if c_m > LOG2 + 1e-12:
        raise InvalidParameterError(f"C_M cannot exceed log 2, got {c_m!r}")


def alpha_mle_bounded(a: float, c: float, beta: float) -> float:
    """Error width of the exact argmax estimator under a bounded ratio
    spread: (2 A^2 / C^2) * log(32 / (3 beta))."""
    _require_finite_pos("A", a)
    _require_finite_pos("C", c)
    _require_beta(beta)
    return (2.0 * a * a) / (c * c) * math.log(32.0 / (3.0 * beta))


def alpha_private_bounded(a: float, c: float, beta: float, epsilon: float) -> float:
    """Error width of the private detector under a bounded ratio spread:
    max{(8 A^2 / C^2) log(64 / 3 beta), (4 A / C eps) log(16 / beta)};
    epsilon = inf drops the noise term."""
    _require_finite_pos("A", a)
    _require_finite_pos("C", c)
    _require_beta(beta)
    _require_eps(epsilon)
    data_term = (8.0 * a * a) / (c * c) * math.log(64.0 / (3.0 * beta))
    noise_term = 0.0 if math.isinf(epsilon) else (4.0 * a) / (c * epsilon) * math.log(16.0 / beta)
    return max(data_term, noise_term)


def alpha_mle_relaxed(c_m: float, beta: float) -> float:
    """Error width of the exact argmax estimator under the tail-bound
    regime: (67 / C_M^2) * log(64 / (3 beta))."""
    _require_cm(c_m)
    _require_beta(beta)
    return 67.0 / (c_m * c_m) * math.log(64.0 / (3.0 * beta))


def alpha_private_relaxed(a: float, c_m: float, beta: float, epsilon: float) -> float:
    """Error width of the private detector under the tail-bound regime:
    max{(262 / C_M^2) log(128 / 3 beta), 2 A log(16 / beta) / (C_M eps)}."""
    _require_finite_pos("A", a)
    _require_cm(c_m)
    _require_beta(beta)
    _require_eps(epsilon)
    data_term = 262.0 / (c_m * c_m) * math.log(128.0 / (3.0 * beta))
    noise_term = (
        0.0 if math.isinf(epsilon) else 2.0 * a * math.log(16.0 / beta) / (c_m * epsilon)
    )
    return max(data_term, noise_term)


def online_threshold_range(
    a: float, c: float, n: int, k_star: int, beta: float, epsilon: float
) -> ThresholdRange:
    """Analytic window [T_L, T_U] of alarm thresholds that keep the online
    detector from alarming before the change while still alarming within
    half a window after it.  Requires k_star >= n/2 so a window can straddle
    the change; epsilon = inf drops the noise terms from both endpoints.
    The range may be empty (feasible == False) when the window is too small.
    """
    _require_finite_pos("A", a)
    _require_finite_pos("C", c)
    _require_beta(beta)
    _require_eps(epsilon)
    if n < 2:
        raise InvalidParameterError(f"n must be >= 2, got {n!r}")
    if k_star < n / 2:
        raise InvalidParameterError(
            f"k_star must be at least n/2 (got k_star={k_star!r}, n={n!r})"
        )
    noise = 0.0 if math.isinf(epsilon) else (16.0 * a / epsilon) * math.log(8.0 * k_star / beta)
    t_low = 2.0 * a * math.sqrt(2.0 * math.log(64.0 * k_star / beta)) - c + noise
    t_high = n * c / 2.0 - (a / 2.0) * math.sqrt(n * math.log(8.0 / beta)) - noise
    return ThresholdRange(t_low=t_low, t_high=t_high)


def online_alpha(a: float, c: float, n: int, beta: float, epsilon: float) -> float:
    """Error width of the online detector with window n:
    max{(16 A^2 / C^2) log(32 n / beta), (4 A / C eps) log(8 n / beta)}."""
    _require_finite_pos("A", a)
    _require_finite_pos("C", c)
    _require_beta(beta)
    _require_eps(epsilon)
    if n < 2:
        raise InvalidParameterError(f"n must be >= 2, got {n!r}")
    data_term = (16.0 * a * a) / (c * c) * math.log(32.0 * n / beta)
    noise_term = (
        0.0 if math.isinf(epsilon) else (4.0 * a) / (c * epsilon) * math.log(8.0 * n / beta)
    )
    return max(data_term, noise_term)


def evaluate_bound(
    which: BoundKind,
    *,
    a: float = math.nan,
    c_or_cm: float = math.nan,
    beta: float,
    epsilon: float = math.inf,
    n: int = 0,
) -> AccuracyBound:
    """Dispatch to the matching alpha formula, packaging inputs alongside."""
    if which is BoundKind.MLE_BOUNDED:
        alpha = alpha_mle_bounded(a, c_or_cm, beta)
    elif which is BoundKind.PRIVATE_BOUNDED:
        alpha = alpha_private_bounded(a, c_or_cm, beta, epsilon)
    elif which is BoundKind.MLE_RELAXED:
        alpha = alpha_mle_relaxed(c_or_cm, beta)
    elif which is BoundKind.PRIVATE_RELAXED:
        alpha = alpha_private_relaxed(a, c_or_cm, beta, epsilon)
    elif which is BoundKind.ONLINE:
        alpha = online_alpha(a, c_or_cm, n, beta, epsilon)
    else:  # pragma: no cover
        raise InvalidParameterError(f"unknown bound kind {which!r}")
    return AccuracyBound(alpha=alpha, which=which, a=a, c_or_cm=c_or_cm, beta=beta, epsilon=epsilon)
