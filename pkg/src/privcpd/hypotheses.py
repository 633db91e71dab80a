"""Hypothesis pairs: the two candidate distributions a detector tests between.

Two families are supported: Bernoulli(p0) -> Bernoulli(p1), and unit-variance
Gaussian N(mu0, 1) -> N(mu1, 1).  A pair knows its pointwise log-likelihood
ratio, the worst-case spread of that ratio (which calibrates Laplace noise in
the bounded-sensitivity mode), the tail-based constant that replaces the
spread when it is unbounded, the KL-divergence constants entering all
accuracy bounds, and how to sample from either side of the change.

All pairs are immutable and safe to share across threads; sampling draws
from a caller-owned ``numpy.random.Generator``.
"""

from __future__ import annotations

import abc
import enum
import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy import integrate
from scipy.special import ndtr, ndtri

from .errors import InvalidObservationError, InvalidParameterError, NumericError

LOG2 = math.log(2.0)

# Bisection for the tail constant stops once the bracket is this narrow.
_BISECT_TOL = 1e-9

# Quadrature window for the Gaussian mixture divergence, in standard
# deviations beyond each mean; the integrand decays like a Gaussian tail.
_QUAD_SPAN = 12.0


class Regime(enum.Enum):
    """Which side of the change a sample is drawn from."""

    PRE = "pre"
    POST = "post"


class HypothesisPair(abc.ABC):
    """Immutable pair (P0, P1) of candidate distributions."""

    @abc.abstractmethod
    def log_ratio(self, x: float) -> float:
        """log(P1(x) / P0(x)) for a single observation."""

    @abc.abstractmethod
    def log_ratios(self, xs) -> np.ndarray:
        """Vectorized :meth:`log_ratio`; raises on the first invalid entry."""

    @abc.abstractmethod
    def delta_ell(self) -> float:
        """Spread max_x log-ratio - min_x log-ratio; may be ``inf``."""

    @abc.abstractmethod
    def tail_prob(self, t: float) -> float:
        """Mass of {2 * |log-ratio| > t}, maximized over the two distributions."""

    @abc.abstractmethod
    def kl_constants(self) -> tuple[float, float]:
        """(C, C_M): the smaller KL divergence between the two distributions,
        and the smaller divergence from either of them to their equal mixture.
        C_M always lies in [0, log 2]."""

    @abc.abstractmethod
    def sample(self, regime: Regime, rng: np.random.Generator, size=None):
        """One draw (or ``size`` draws) from P0 (PRE) or P1 (POST)."""

    @abc.abstractmethod
    def swapped(self) -> "HypothesisPair":
        """The pair with P0 and P1 exchanged."""

    def a_delta(self, delta: float) -> float:
        """Smallest t whose tail mass (per :meth:`tail_prob`) is below delta/2.

        Used as the Laplace-noise calibration constant when the ratio spread
        is unbounded; models with a closed form override ``_a_delta``.
        """
        _check_delta(delta)
        return self._a_delta(delta)

    def _a_delta(self, delta: float) -> float:
        return bisect_a_delta(self, delta)


def _check_delta(delta: float) -> None:
    if not 0.0 < delta < 1.0:
        raise InvalidParameterError(f"delta must lie in (0, 1), got {delta}")


def bisect_a_delta(pair: HypothesisPair, delta: float) -> float:
    """Locate min{t : tail_prob(t) < delta/2} by monotone bisection.

    ``tail_prob`` is non-increasing in t, so an upper bracket is grown by
    doubling and the bracket is then halved until it is narrower than 1e-9.
    Works for any model, including ones whose tail function is a step
    function (the bisection converges to the jump location).
    """
    _check_delta(delta)
    target = delta / 2.0
    if pair.tail_prob(0.0) < target:
        return 0.0
    hi = 1.0
    while pair.tail_prob(hi) >= target:
        hi *= 2.0
        if hi > 1e12:
            raise NumericError("tail mass does not fall below delta/2 for any t <= 1e12")
    lo = 0.0
    while hi - lo > _BISECT_TOL:
        mid = 0.5 * (lo + hi)
        if pair.tail_prob(mid) >= target:
            lo = mid
        else:
            hi = mid
    return hi


@dataclass(frozen=True)
class BernoulliPair(HypothesisPair):
    """Bernoulli(p0) -> Bernoulli(p1) with 0 < p0, p1 < 1 and p0 != p1."""

    p0: float
    p1: float

    def __post_init__(self):
        for name, p in (("p0", self.p0), ("p1", self.p1)):
            if not (isinstance(p, (int, float)) and 0.0 < p < 1.0):
                raise InvalidParameterError(f"{name} must lie in (0, 1), got {p!r}")
        if self.p0 == self.p1:
            raise InvalidParameterError("p0 and p1 must differ")

    @cached_property
    def _lr0(self) -> float:
        return math.log((1.0 - self.p1) / (1.0 - self.p0))

    @cached_property
    def _lr1(self) -> float:
        return math.log(self.p1 / self.p0)

    def log_ratio(self, x: float) -> float:
        if x == 1.0:
            return self._lr1
        if x == 0.0:
            return self._lr0
        raise InvalidObservationError(f"Bernoulli observation must be 0 or 1, got {x!r}")

    def log_ratios(self, xs) -> np.ndarray:
        xs = np.asarray(xs, dtype=np.float64)
        ones = xs == 1.0
        bad = ~(ones | (xs == 0.0))
        if bad.any():
            pos = int(np.argmax(bad.ravel()))
            raise InvalidObservationError(
                f"observation {pos + 1} is not a Bernoulli value: {xs.ravel()[pos]!r}",
                index=pos + 1,
            )
        return np.where(ones, self._lr1, self._lr0)

    def delta_ell(self) -> float:
        return abs(self._lr1 - self._lr0)

    def tail_prob(self, t: float) -> float:
        v0 = 2.0 * abs(self._lr0)
        v1 = 2.0 * abs(self._lr1)
        worst = 0.0
        for q1 in (self.p0, self.p1):
            mass = (1.0 - q1) * (v0 > t) + q1 * (v1 > t)
            worst = max(worst, mass)
        return worst

    def _a_delta(self, delta: float) -> float:
        # Finite support: the minimizer is one of the support values of
        # 2*|log-ratio| (or 0), so scan them in increasing order.
        target = delta / 2.0
        for t in sorted({0.0, 2.0 * abs(self._lr0), 2.0 * abs(self._lr1)}):
            if self.tail_prob(t) < target:
                return t
        raise AssertionError("unreachable: tail mass is 0 at the largest support value")

    def kl_constants(self) -> tuple[float, float]:
        c = min(_bernoulli_kl(self.p0, self.p1), _bernoulli_kl(self.p1, self.p0))
        m = 0.5 * (self.p0 + self.p1)
        c_m = min(_bernoulli_kl(self.p0, m), _bernoulli_kl(self.p1, m))
        return c, min(max(c_m, 0.0), LOG2)

    def sample(self, regime: Regime, rng: np.random.Generator, size=None):
        p = self.p0 if regime is Regime.PRE else self.p1
        if size is None:
            return 1.0 if rng.random() < p else 0.0
        return (rng.random(size) < p).astype(np.float64)

    def swapped(self) -> "BernoulliPair":
        return BernoulliPair(self.p1, self.p0)


def _bernoulli_kl(p: float, q: float) -> float:
    return p * math.log(p / q) + (1.0 - p) * math.log((1.0 - p) / (1.0 - q))


@dataclass(frozen=True)
class GaussianPair(HypothesisPair):
    """N(mu0, 1) -> N(mu1, 1) with mu0 != mu1 (variance fixed at one).

    The log-likelihood ratio is linear in x, hence unbounded: the spread is
    infinite and noise must be calibrated from the tail constant instead.
    """

    mu0: float
    mu1: float

    def __post_init__(self):
        if not (math.isfinite(self.mu0) and math.isfinite(self.mu1)):
            raise InvalidParameterError("means must be finite")
        if self.mu0 == self.mu1:
            raise InvalidParameterError("mu0 and mu1 must differ")

    @cached_property
    def _shift(self) -> float:
        return self.mu1 - self.mu0

    @cached_property
    def _mid(self) -> float:
        return 0.5 * (self.mu0 + self.mu1)

    def log_ratio(self, x: float) -> float:
        return self._shift * (x - self._mid)

    def log_ratios(self, xs) -> np.ndarray:
        return self._shift * (np.asarray(xs, dtype=np.float64) - self._mid)

    def delta_ell(self) -> float:
        return math.inf

    def tail_prob(self, t: float) -> float:
        # Dominant tail of 2*|log-ratio|, identical under both means by
        # symmetry.  The opposite tail is exponentially smaller and excluded
        # so that this function is the exact inverse of the closed form in
        # ``_a_delta`` (bisection and closed form then agree to tolerance).
        mu = abs(self._shift)
        return float(1.0 - ndtr(t / (2.0 * mu) - 0.5 * mu))

    def _a_delta(self, delta: float) -> float:
        mu = abs(self._shift)
        return 2.0 * mu * (float(ndtri(1.0 - 0.5 * delta)) + 0.5 * mu)

    def kl_constants(self) -> tuple[float, float]:
        c = 0.5 * self._shift * self._shift
        c_m = min(self._mixture_kl(self.mu0, +1.0), self._mixture_kl(self.mu1, -1.0))
        return c, c_m

    def _mixture_kl(self, mean: float, sign: float) -> float:
        # E_{x ~ N(mean,1)}[log(2 p(x) / (p0(x) + p1(x)))] for the density p
        # centred at ``mean``; equals log 2 - E[log(1 + exp(sign * r(x)))]
        # with r the log-ratio, written through logaddexp for stability.
        def integrand(x: float) -> float:
            z = x - mean
            density = math.exp(-0.5 * z * z) / math.sqrt(2.0 * math.pi)
            return density * (LOG2 - float(np.logaddexp(0.0, sign * self.log_ratio(x))))

        lo = min(self.mu0, self.mu1) - _QUAD_SPAN
        hi = max(self.mu0, self.mu1) + _QUAD_SPAN
        value, err = integrate.quad(integrand, lo, hi, epsabs=1e-10, epsrel=1e-10, limit=200)
        if not math.isfinite(value) or err > 1e-8:
            raise NumericError(
                f"mixture divergence quadrature failed (value={value!r}, abs error={err!r})"
            )
        if value < -1e-9 or value > LOG2 + 1e-9:
            raise NumericError(f"mixture divergence outside [0, log 2]: {value!r}")
        return min(max(value, 0.0), LOG2)

    def sample(self, regime: Regime, rng: np.random.Generator, size=None):
        mean = self.mu0 if regime is Regime.PRE else self.mu1
        if size is None:
            return float(rng.normal(mean, 1.0))
        return rng.normal(mean, 1.0, size)

    def swapped(self) -> "GaussianPair":
        return GaussianPair(self.mu1, self.mu0)
