"""Monte Carlo harness: stream generation, offline and online accuracy
curves (empirical failure probability as a function of the error budget
alpha), and the empirical quantile search for the online alarm threshold.

Reproducibility contract: every trial derives its own generator from
(master_seed, epsilon-index, trial-index), so results are independent of
execution order and reruns with the same master seed produce bit-identical
CSV files.  Trials are embarrassingly parallel under that seeding scheme;
this implementation runs them sequentially.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from . import _kernels
from .bounds import ThresholdRange
from .errors import InvalidParameterError, PrivcpdError
from .hypotheses import HypothesisPair, Regime
from .mechanisms import PrivacyParams, sample_laplace
from .offline import detect_offline, noise_bound
from .online import OnlineConfig, detect_online

# Below this many expected samples in the estimated tail, a nearest-rank
# quantile is dominated by a handful of order statistics.
_QUANTILE_MIN_TAIL = 10.0


def generate_stream(
    true_pair: HypothesisPair, k_star: int, length: int, rng: np.random.Generator
) -> np.ndarray:
    """length observations with the change at k_star (1-based): x_i is drawn
    pre-change for i < k_star and post-change for i >= k_star.  k_star = 1
    means the whole stream is post-change; k_star = length + 1 means no
    change ever happens."""
    if length < 1:
        raise InvalidParameterError(f"length must be >= 1, got {length!r}")
    if not 1 <= k_star <= length + 1:
        raise InvalidParameterError(
            f"k_star must lie in [1, {length + 1}], got {k_star!r}"
        )
    pre = true_pair.sample(Regime.PRE, rng, size=k_star - 1)
    post = true_pair.sample(Regime.POST, rng, size=length - k_star + 1)
    return np.concatenate([pre, post])


@dataclass(frozen=True)
class OfflineScenario:
    """One offline experiment: true generating pair, hypothesized pair fed
    to the detector (they may differ), and the trial grid."""

    true_pair: HypothesisPair
    hypothesized_pair: HypothesisPair
    n: int
    k_star: int
    epsilons: tuple[float, ...]
    trials: int
    tail_delta: float = 0.0
    master_seed: int = 0
    scenario_id: str = "offline"

    def __post_init__(self):
        object.__setattr__(self, "epsilons", tuple(self.epsilons))
        if not 1 < self.k_star <= self.n:
            raise InvalidParameterError(
                f"k_star must lie in (1, n], got k_star={self.k_star!r}, n={self.n!r}"
            )
        if self.trials < 1:
            raise InvalidParameterError("trials must be >= 1")
        if self.master_seed < 0:
            raise InvalidParameterError("master_seed must be a nonnegative integer")
        if not self.epsilons:
            raise InvalidParameterError("epsilons must be non-empty")


@dataclass(frozen=True)
class OnlineScenario:
    true_pair: HypothesisPair
    hypothesized_pair: HypothesisPair
    window_n: int
    k_star: int
    threshold_t: float
    epsilons: tuple[float, ...]
    trials: int
    max_stream_len: int
    tail_delta: float = 0.0
    master_seed: int = 0
    scenario_id: str = "online"

    def __post_init__(self):
        object.__setattr__(self, "epsilons", tuple(self.epsilons))
        if self.window_n < 2:
            raise InvalidParameterError("window_n must be >= 2")
        if self.k_star < self.window_n / 2:
            raise InvalidParameterError(
                f"k_star must be at least window_n/2, got {self.k_star!r}"
            )
        if self.max_stream_len < self.k_star + self.window_n:
            raise InvalidParameterError(
                "max_stream_len must be at least k_star + window_n"
            )
        if self.trials < 1:
            raise InvalidParameterError("trials must be >= 1")
        if self.master_seed < 0:
            raise InvalidParameterError("master_seed must be a nonnegative integer")
        if not self.epsilons:
            raise InvalidParameterError("epsilons must be non-empty")


@dataclass(frozen=True)
class AccuracyCurve:
    """Empirical failure probability per integer alpha, for one epsilon.

    ``betas`` is non-increasing by construction (the failure events are
    nested).  For the conditional online metric, an empty conditioning set
    makes every entry NaN.  ``no_alarm_fraction`` is populated on online
    curves only.
    """

    scenario: str
    epsilon: float
    alphas: np.ndarray
    betas: np.ndarray
    metric: str = "beta"
    no_alarm_fraction: Optional[float] = None


def _trial_rng(master_seed: int, eps_index: int, trial: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence((master_seed, eps_index, trial)))


def _exceedance(errors: np.ndarray, grid_len: int) -> np.ndarray:
    """counts[a] = #{errors > a} for a = 0 .. grid_len - 1."""
    hist = np.bincount(errors, minlength=grid_len + 1)[:grid_len + 1]
    return errors.size - np.cumsum(hist)[:grid_len]


def _with_trial_context(exc: PrivcpdError, epsilon: float, trial: int) -> PrivcpdError:
    exc.args = (f"trial {trial} (epsilon={epsilon}): {exc}",)
    return exc


def run_offline(scenario: OfflineScenario) -> list[AccuracyCurve]:
    """Per epsilon: run independent (stream, detect) trials and tabulate the
    empirical failure probability over the integer alpha grid 0..n."""
    # Fail fast if the hypothesized pair cannot be noise-calibrated at all.
    noise_bound(scenario.hypothesized_pair, PrivacyParams(1.0, scenario.tail_delta))
    alphas = np.arange(scenario.n + 1)
    curves = []
    for e_idx, eps in enumerate(scenario.epsilons):
        privacy = PrivacyParams(eps, scenario.tail_delta)
        errors = np.empty(scenario.trials, dtype=np.int64)
        for t in range(scenario.trials):
            rng = _trial_rng(scenario.master_seed, e_idx, t)
            stream = generate_stream(scenario.true_pair, scenario.k_star, scenario.n, rng)
            try:
                result = detect_offline(scenario.hypothesized_pair, stream, privacy, rng)
            except PrivcpdError as exc:
                raise _with_trial_context(exc, eps, t)
            errors[t] = abs(result.k_tilde - scenario.k_star)
        betas = _exceedance(errors, alphas.size) / scenario.trials
        curves.append(AccuracyCurve(scenario.scenario_id, eps, alphas, betas))
    return curves


def run_online(
    scenario: OnlineScenario,
) -> tuple[list[AccuracyCurve], list[AccuracyCurve]]:
    """Per epsilon: run trials of (stream, detect_online) and tabulate two
    curve families over the grid 0..window_n.

    The marginal metric counts a trial as failed at every alpha when no
    alarm fires by max_stream_len or the alarmed window misses the true
    change; the conditional metric restricts to trials whose alarm window
    contains the change (no-alarm trials are excluded from it entirely).
    """
    noise_bound(scenario.hypothesized_pair, PrivacyParams(1.0, scenario.tail_delta))
    alphas = np.arange(scenario.window_n + 1)
    marginal_curves = []
    conditional_curves = []
    for e_idx, eps in enumerate(scenario.epsilons):
        config = OnlineConfig(
            window_n=scenario.window_n,
            threshold_t=scenario.threshold_t,
            privacy=PrivacyParams(eps),
            tail_delta=scenario.tail_delta,
        )
        no_alarm = 0
        wrong_window = 0
        in_window_errors = []
        for t in range(scenario.trials):
            rng = _trial_rng(scenario.master_seed, e_idx, t)
            stream = generate_stream(
                scenario.true_pair, scenario.k_star, scenario.max_stream_len, rng
            )
            try:
                res = detect_online(scenario.hypothesized_pair, iter(stream), config, rng)
            except PrivcpdError as exc:
                raise _with_trial_context(exc, eps, t)
            if not res.alarmed:
                no_alarm += 1
            elif not res.window_start <= scenario.k_star <= res.alarm_time_j:
                wrong_window += 1
            else:
                in_window_errors.append(abs(res.k_tilde_global - scenario.k_star))
        errors = np.asarray(in_window_errors, dtype=np.int64)
        exceed = _exceedance(errors, alphas.size)
        frac_no_alarm = no_alarm / scenario.trials
        beta1 = (no_alarm + wrong_window + exceed) / scenario.trials
        if errors.size:
            beta2 = exceed / errors.size
        else:
            beta2 = np.full(alphas.size, np.nan)
        marginal_curves.append(
            AccuracyCurve(scenario.scenario_id, eps, alphas, beta1, "beta1", frac_no_alarm)
        )
        conditional_curves.append(
            AccuracyCurve(scenario.scenario_id, eps, alphas, beta2, "beta2", frac_no_alarm)
        )
    return marginal_curves, conditional_curves


def nearest_rank_quantile(samples: np.ndarray, q: float) -> float:
    """Order-statistic quantile: the ceil(q*N)-th smallest sample.

    Warns when the estimated tail holds fewer than ~10 samples, where the
    estimate is dominated by a couple of extreme order statistics.
    """
    if not 0.0 < q < 1.0:
        raise InvalidParameterError(f"quantile must lie in (0, 1), got {q!r}")
    n = samples.size
    if n == 0:
        raise InvalidParameterError("cannot take a quantile of an empty sample")
    tail = n * min(q, 1.0 - q)
    if tail < _QUANTILE_MIN_TAIL:
        warnings.warn(
            f"quantile {q} estimated from only ~{tail:.1f} tail samples "
            f"({n} realizations); increase realizations for a stable estimate",
            stacklevel=2,
        )
    rank = min(max(int(math.ceil(q * n)), 1), n)
    return float(np.partition(samples, rank - 1)[rank - 1])


def empirical_threshold_range(
    pair: HypothesisPair,
    epsilon: float,
    n: int,
    k_star: int,
    fa_rate: float,
    miss_rate: float,
    realizations: int,
    rng: np.random.Generator,
    tail_delta: float = 0.0,
) -> ThresholdRange:
    """Quantile search for a workable online alarm threshold.

    t_low is the (1 - fa_rate / k_star) quantile of noisy final CUSUM
    statistics over pure-pre-change windows of length n: staying above it
    keeps the union false-alarm rate over ~k_star windows below fa_rate.
    t_high is the miss_rate quantile when the change lands mid-window, so
    any threshold below it is crossed with probability >= 1 - miss_rate by
    a window straddling the change.  The added noise matches the online
    detector's per-step query noise, Lap(8 A / epsilon); epsilon = inf adds
    none (``tail_delta`` selects the calibration mode for A, as in the
    detectors, and is only consulted when epsilon is finite).
    """
    if n < 2:
        raise InvalidParameterError(f"n must be >= 2, got {n!r}")
    if k_star < 1:
        raise InvalidParameterError(f"k_star must be >= 1, got {k_star!r}")
    for name, rate in (("fa_rate", fa_rate), ("miss_rate", miss_rate)):
        if not 0.0 < rate < 1.0:
            raise InvalidParameterError(f"{name} must lie in (0, 1), got {rate!r}")
    if realizations < 1000:
        raise InvalidParameterError(
            f"realizations must be >= 1000 for usable quantiles, got {realizations!r}"
        )
    q_scale = 0.0
    if math.isfinite(epsilon):
        a, _ = noise_bound(pair, PrivacyParams(epsilon, tail_delta))
        q_scale = 8.0 * a / epsilon

    pre_only = pair.sample(Regime.PRE, rng, size=(realizations, n))
    w_pre = _kernels.cusum_final(pair.log_ratios(pre_only))
    w_pre = w_pre + sample_laplace(q_scale, rng, size=realizations)
    t_low = nearest_rank_quantile(w_pre, 1.0 - fa_rate / k_star)

    mid = n // 2  # change at mid-window: mid - 1 pre points, the rest post
    pre_block = pair.sample(Regime.PRE, rng, size=(realizations, mid - 1))
    post_block = pair.sample(Regime.POST, rng, size=(realizations, n - mid + 1))
    w_mid = _kernels.cusum_final(pair.log_ratios(np.hstack([pre_block, post_block])))
    w_mid = w_mid + sample_laplace(q_scale, rng, size=realizations)
    t_high = nearest_rank_quantile(w_mid, miss_rate)

    return ThresholdRange(t_low=t_low, t_high=t_high)


def format_epsilon(epsilon: float) -> str:
    return "inf" if math.isinf(epsilon) else format(epsilon, ".6g")


def _fmt(x: float) -> str:
    return format(x, ".6g")


def write_offline_csv(curves: Sequence[AccuracyCurve], path) -> None:
    """One experiment per file; header ``scenario,epsilon,alpha,beta``."""
    lines = ["scenario,epsilon,alpha,beta"]
    for curve in curves:
        eps = format_epsilon(curve.epsilon)
        for alpha, beta in zip(curve.alphas, curve.betas):
            lines.append(f"{curve.scenario},{eps},{int(alpha)},{_fmt(beta)}")
    _write_lines(path, lines)


def write_online_csv(
    marginal: Sequence[AccuracyCurve], conditional: Sequence[AccuracyCurve], path
) -> None:
    """Header ``scenario,epsilon,alpha,beta1,beta2,no_alarm_fraction``; an
    undefined conditional value is written as the token ``nan``."""
    if len(marginal) != len(conditional):
        raise InvalidParameterError("curve families must pair up one-to-one")
    lines = ["scenario,epsilon,alpha,beta1,beta2,no_alarm_fraction"]
    for b1, b2 in zip(marginal, conditional):
        if (b1.scenario, b1.epsilon) != (b2.scenario, b2.epsilon):
            raise InvalidParameterError("curve families must pair up one-to-one")
        eps = format_epsilon(b1.epsilon)
        frac = _fmt(b1.no_alarm_fraction if b1.no_alarm_fraction is not None else 0.0)
        for alpha, v1, v2 in zip(b1.alphas, b1.betas, b2.betas):
            lines.append(f"{b1.scenario},{eps},{int(alpha)},{_fmt(v1)},{_fmt(v2)},{frac}")
    _write_lines(path, lines)


def _write_lines(path, lines: list[str]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")
