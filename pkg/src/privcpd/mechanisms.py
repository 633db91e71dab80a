"""Noise mechanisms: Laplace sampling, noisy-argmax selection, and the
streaming noisy-threshold test, plus the closed-form accuracy width of the
threshold test.

Everything here is a pure function of its inputs and the supplied random
generator, so callers may run any number of instances concurrently as long
as each owns its generator.  ``epsilon = inf`` is the non-private baseline:
all noise scales collapse to zero and the operations become exact.
"""

from __future__ import annotations

import math
import operator
from dataclasses import dataclass
from typing import Iterable, Optional

import numpy as np

from .errors import InvalidInputError, InvalidParameterError


@dataclass(frozen=True)
class PrivacyParams:
    """Privacy budget (epsilon, delta); epsilon = inf disables noise."""

    epsilon: float
    delta: float = 0.0

    def __post_init__(self):
        if math.isnan(self.epsilon) or self.epsilon <= 0.0:
            raise InvalidParameterError(
                f"epsilon must be positive (inf allowed), got {self.epsilon!r}"
            )
        if not 0.0 <= self.delta < 1.0:
            raise InvalidParameterError(f"delta must lie in [0, 1), got {self.delta!r}")

    @property
    def is_private(self) -> bool:
        return math.isfinite(self.epsilon)


@dataclass(frozen=True)
class LaplaceScale:
    """Scale of zero-centred Laplace noise; 0 means exactly no noise."""

    b: float

    def __post_init__(self):
        if math.isnan(self.b) or self.b < 0.0:
            raise InvalidParameterError(f"Laplace scale must be >= 0, got {self.b!r}")
        if math.isinf(self.b):
            raise InvalidParameterError("infinite Laplace scale is not runnable")


def sample_laplace(scale, rng: np.random.Generator, size=None):
    """Laplace(0, b) draws via inverse CDF on a uniform in (-1/2, 1/2).

    ``scale`` may be a :class:`LaplaceScale` or a bare nonnegative float.
    b == 0 returns exact zeros and consumes no randomness.  The endpoint
    u == -1/2 (probability ~2^-53) is redrawn to keep the output finite.
    """
    b = scale.b if isinstance(scale, LaplaceScale) else LaplaceScale(float(scale)).b
    if b == 0.0:
        return 0.0 if size is None else np.zeros(size)
    if size is None:
        u = rng.uniform(-0.5, 0.5)
        while u == -0.5:
            u = rng.uniform(-0.5, 0.5)
        return -b * math.copysign(1.0, u) * math.log1p(-2.0 * abs(u))
    u = rng.uniform(-0.5, 0.5, size)
    bad = u == -0.5
    while bad.any():
        u[bad] = rng.uniform(-0.5, 0.5, int(bad.sum()))
        bad = u == -0.5
    return -b * np.sign(u) * np.log1p(-2.0 * np.abs(u))


def _check_sensitivity(sensitivity: float) -> None:
    if math.isnan(sensitivity) or sensitivity < 0.0 or math.isinf(sensitivity):
        raise InvalidParameterError(
            f"sensitivity must be finite and >= 0, got {sensitivity!r}"
        )


def report_noisy_max(
    values, sensitivity: float, privacy: PrivacyParams, rng: np.random.Generator
) -> int:
    """Index (0-based) of the largest Laplace-perturbed value.

    Each entry receives independent Laplace(sensitivity / epsilon) noise;
    epsilon = inf zeroes the scale, reducing this to the exact argmax with
    ties broken toward the smallest index.
    """
    vals = np.asarray(values, dtype=np.float64)
    if vals.ndim != 1 or vals.size == 0:
        raise InvalidInputError("values must be a non-empty 1-d sequence")
    _check_sensitivity(sensitivity)
    noise = sample_laplace(sensitivity / privacy.epsilon, rng, size=vals.size)
    return int(np.argmax(vals + noise))


def above_noisy_threshold(
    queries: Iterable[float],
    sensitivity: float,
    threshold: float,
    privacy: PrivacyParams,
    rng: np.random.Generator,
) -> Optional[int]:
    """First index whose noisy query strictly exceeds the noisy threshold.

    The threshold is perturbed once with Lap(2*sensitivity/epsilon) and each
    query with fresh Lap(4*sensitivity/epsilon).  Queries are pulled lazily,
    each consumed at most once, and the iterator is never touched again
    after the first crossing; ``None`` is returned if the stream ends first.
    epsilon = inf zeroes both scales, giving the exact strict comparison.
    """
    _check_sensitivity(sensitivity)
    eps = privacy.epsilon
    t_hat = threshold + sample_laplace(2.0 * sensitivity / eps, rng)
    q_scale = 4.0 * sensitivity / eps
    for i, q in enumerate(queries):
        if q + sample_laplace(q_scale, rng) > t_hat:
            return i
    return None


def abovethresh_alpha(m: int, sensitivity: float, beta: float, epsilon: float) -> float:
    """Accuracy width of the noisy-threshold test over m queries:
    8 * sensitivity * log(2 m / beta) / epsilon (0 when epsilon is inf)."""
    try:
        m = int(operator.index(m))
    except TypeError:
        raise InvalidParameterError(f"m must be an integer >= 1, got {m!r}") from None
    if m < 1:
        raise InvalidParameterError(f"m must be an integer >= 1, got {m!r}")
    _check_sensitivity(sensitivity)
    if not 0.0 < beta < 1.0:
        raise InvalidParameterError(f"beta must lie in (0, 1), got {beta!r}")
    if math.isnan(epsilon) or epsilon <= 0.0:
        raise InvalidParameterError(f"epsilon must be positive, got {epsilon!r}")
    return 8.0 * sensitivity * math.log(2.0 * m / beta) / epsilon
