"""Streaming detection: the CUSUM recursion, windowed profile maxima served
by a monotone deque over prefix sums, and the alarm loop that feeds windowed
maxima to the noisy-threshold test and hands the alarmed window to the
offline detector at half the privacy budget.

A running detector is stateful and single-threaded; distinct instances with
distinct generators may run concurrently.  Memory stays O(window) regardless
of stream length.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Iterator, Optional

import numpy as np

from .errors import InsufficientDataError, InvalidParameterError, NotReadyError
from .hypotheses import HypothesisPair
from .mechanisms import PrivacyParams, above_noisy_threshold
from .offline import detect_offline, noise_bound


def cusum_step(w_prev: float, ratio: float) -> float:
    """One CUSUM update: max(w_prev, 0) + ratio."""
    return max(w_prev, 0.0) + ratio


def cusum_trace(ratios) -> np.ndarray:
    """Running CUSUM over a ratio sequence, seeded with the first ratio so
    trace[i] is the best suffix sum ending at i (no floor at zero)."""
    ratios = np.asarray(ratios, dtype=np.float64)
    if ratios.ndim != 1 or ratios.size == 0:
        raise InvalidParameterError("ratios must be a non-empty 1-d sequence")
    out = np.empty(ratios.size)
    w = float(ratios[0])
    out[0] = w
    for i in range(1, ratios.size):
        w = cusum_step(w, float(ratios[i]))
        out[i] = w
    return out


class CusumWindow:
    """Sliding-window maximum of suffix log-likelihood sums.

    Feeding ratio r_j advances the prefix sum S_j = r_1 + ... + r_j; the
    window maximum max_{j-n+1 <= k <= j} (r_k + ... + r_j) equals
    S_j - min_{j-n <= m <= j-1} S_m.  A deque kept increasing in S serves
    that minimum in O(1) amortized time and never holds more than n entries.
    """

    def __init__(self, n: int):
        if n < 1:
            raise InvalidParameterError(f"window size must be >= 1, got {n}")
        self.n = n
        self.count = 0  # points consumed so far (the current j)
        self._prefix = 0.0  # S_j
        self._mins: deque[tuple[int, float]] = deque()  # (m, S_m), increasing in S_m

    def push(self, ratio: float) -> None:
        s_prev = self._prefix  # S_{j-1} becomes a candidate minimum
        while self._mins and self._mins[-1][1] >= s_prev:
            self._mins.pop()
        self._mins.append((self.count, s_prev))
        self.count += 1
        self._prefix = s_prev + ratio
        cutoff = self.count - self.n  # candidates span [j-n, j-1]
        while self._mins[0][0] < cutoff:
            self._mins.popleft()

    @property
    def ready(self) -> bool:
        return self.count >= self.n

    def max_llr(self) -> float:
        if not self.ready:
            raise NotReadyError(
                f"window needs {self.n} points before the first query, have {self.count}"
            )
        return self._prefix - self._mins[0][1]


@dataclass(frozen=True)
class OnlineConfig:
    """Streaming detector configuration.

    ``tail_delta = 0`` requires the pair's ratio spread to be finite at run
    time; ``tail_delta > 0`` calibrates noise from the tail constant instead
    (a deliberately weaker privacy regime, also forwarded to the offline
    call on the alarmed window).  The privacy budget is split half for the
    threshold test and half for that offline call; the split is fixed.
    """

    window_n: int
    threshold_t: float
    privacy: PrivacyParams
    tail_delta: float = 0.0

    def __post_init__(self):
        if self.window_n < 2:
            raise InvalidParameterError(f"window_n must be >= 2, got {self.window_n}")
        if not 0.0 <= self.tail_delta < 1.0:
            raise InvalidParameterError(
                f"tail_delta must lie in [0, 1), got {self.tail_delta!r}"
            )
        if not math.isfinite(self.threshold_t):
            raise InvalidParameterError("threshold must be finite")


@dataclass(frozen=True)
class OnlineResult:
    """Either all three fields are set (an alarm fired) or none are."""

    alarm_time_j: Optional[int] = None
    k_tilde_global: Optional[int] = None
    window_start: Optional[int] = None

    @property
    def alarmed(self) -> bool:
        return self.alarm_time_j is not None


def detect_online(
    pair: HypothesisPair,
    stream: Iterable[float],
    config: OnlineConfig,
    rng: np.random.Generator,
) -> OnlineResult:
    """Scan a stream and localize the change inside the first alarmed window.

    The first n points are buffered; from j = n on, the windowed maximum of
    the suffix log-likelihood is tested against the noisy threshold (noise
    scales 4A/epsilon on the threshold, 8A/epsilon per step).  On the first
    crossing at time j the offline detector runs on {x_{j-n+1}, ..., x_j}
    at (epsilon/2, tail_delta) and its estimate is shifted by j - n back to
    stream time.  epsilon = inf makes every comparison and the offline call
    exact.  A stream that ends without crossing yields the all-none result;
    a stream shorter than n raises ``InsufficientDataError``.
    """
    eps = config.privacy.epsilon
    a, _ = noise_bound(pair, PrivacyParams(eps, config.tail_delta))

    n = config.window_n
    it = iter(stream)
    window: deque[float] = deque(maxlen=n)
    cusum = CusumWindow(n)

    for _ in range(n):
        try:
            x = next(it)
        except StopIteration:
            raise InsufficientDataError(
                f"stream ended after {cusum.count} points; the window needs {n}"
            ) from None
        window.append(x)
        cusum.push(pair.log_ratio(x))

    def windowed_maxima() -> Iterator[float]:
        yield cusum.max_llr()  # first query at j = n
        for x in it:
            window.append(x)
            cusum.push(pair.log_ratio(x))
            yield cusum.max_llr()

    half = PrivacyParams(eps / 2.0, config.tail_delta)
    idx = above_noisy_threshold(
        windowed_maxima(),
        sensitivity=a,
        threshold=config.threshold_t,
        privacy=PrivacyParams(eps / 2.0),
        rng=rng,
    )
    if idx is None:
        return OnlineResult()
    j = n + idx
    local = detect_offline(pair, np.asarray(window, dtype=np.float64), half, rng)
    return OnlineResult(
        alarm_time_j=j,
        k_tilde_global=local.k_tilde + (j - n),
        window_start=j - n + 1,
    )
