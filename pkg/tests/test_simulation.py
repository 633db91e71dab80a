import math

import numpy as np
import pytest

from privcpd import (
    BernoulliPair,
    GaussianPair,
    InfiniteSensitivityError,
    InvalidParameterError,
    OfflineScenario,
    OnlineScenario,
    Regime,
    empirical_threshold_range,
    generate_stream,
    nearest_rank_quantile,
    run_offline,
    run_online,
    write_offline_csv,
    write_online_csv,
)

INF = math.inf
PAIR = BernoulliPair(0.2, 0.8)


# ------------------------------------------------------------- generate_stream


def test_stream_boundaries():
    rng = np.random.default_rng(0)
    pair = GaussianPair(0.0, 50.0)
    all_post = generate_stream(pair, 1, 100, rng)
    assert all_post.mean() > 25  # every point post-change
    all_pre = generate_stream(pair, 101, 100, rng)
    assert all_pre.mean() < 25
    with pytest.raises(InvalidParameterError):
        generate_stream(pair, 0, 100, rng)
    with pytest.raises(InvalidParameterError):
        generate_stream(pair, 102, 100, rng)


def test_stream_concentrates_around_change():
    rng = np.random.default_rng(1)
    stream = generate_stream(PAIR, 100, 200, rng)
    assert stream[:99].mean() == pytest.approx(0.2, abs=0.12)
    assert stream[99:].mean() == pytest.approx(0.8, abs=0.12)


def test_stream_deterministic():
    a = generate_stream(PAIR, 50, 100, np.random.default_rng(5))
    b = generate_stream(PAIR, 50, 100, np.random.default_rng(5))
    np.testing.assert_array_equal(a, b)


# ----------------------------------------------------------------- run_offline


def _offline(**kw):
    base = dict(
        true_pair=PAIR,
        hypothesized_pair=PAIR,
        n=40,
        k_star=20,
        epsilons=(1.0, INF),
        trials=50,
        master_seed=0,
        scenario_id="unit",
    )
    base.update(kw)
    return OfflineScenario(**base)


def test_offline_curves_shape_and_monotonicity():
    curves = run_offline(_offline())
    assert [c.epsilon for c in curves] == [1.0, INF]
    for curve in curves:
        assert curve.alphas.tolist() == list(range(41))
        assert np.all(np.diff(curve.betas) <= 0)
        assert np.all((0 <= curve.betas) & (curve.betas <= 1))


def test_offline_single_exact_trial():
    # deterministic trial: beta(alpha) is the indicator of the estimate
    # missing by more than alpha
    scenario = _offline(trials=1, epsilons=(INF,))
    (curve,) = run_offline(scenario)
    err = int(np.argmax(curve.betas == 0.0))
    assert np.all(curve.betas[:err] == 1.0)
    assert np.all(curve.betas[err:] == 0.0)


def test_offline_rerun_is_bit_identical(tmp_path):
    out1, out2 = tmp_path / "a.csv", tmp_path / "b.csv"
    write_offline_csv(run_offline(_offline()), out1)
    write_offline_csv(run_offline(_offline()), out2)
    assert out1.read_bytes() == out2.read_bytes()


def test_offline_gaussian_requires_tail_delta():
    pair = GaussianPair(0.0, 1.0)
    with pytest.raises(InfiniteSensitivityError):
        run_offline(_offline(true_pair=pair, hypothesized_pair=pair, tail_delta=0.0))
    curves = run_offline(
        _offline(true_pair=pair, hypothesized_pair=pair, tail_delta=0.05, trials=10)
    )
    assert len(curves) == 2


def test_offline_noise_ordering_with_allowance():
    # the noisier curve should not sit meaningfully below the cleaner one
    scenario = _offline(n=60, k_star=30, trials=300, epsilons=(0.5, INF))
    noisy, clean = run_offline(scenario)
    n = scenario.trials
    for a in range(0, 61, 10):
        se = math.sqrt(
            noisy.betas[a] * (1 - noisy.betas[a]) / n
            + clean.betas[a] * (1 - clean.betas[a]) / n
        )
        assert noisy.betas[a] >= clean.betas[a] - 3 * se - 1e-12


def test_offline_scenario_validation():
    with pytest.raises(InvalidParameterError):
        _offline(k_star=1)
    with pytest.raises(InvalidParameterError):
        _offline(k_star=41)
    with pytest.raises(InvalidParameterError):
        _offline(trials=0)
    with pytest.raises(InvalidParameterError):
        _offline(epsilons=())


def test_offline_csv_format(tmp_path):
    out = tmp_path / "c.csv"
    write_offline_csv(run_offline(_offline(trials=3, epsilons=(0.5, INF), n=5, k_star=3)), out)
    text = out.read_text(encoding="utf-8")
    lines = text.strip().split("\n")
    assert lines[0] == "scenario,epsilon,alpha,beta"
    assert len(lines) == 1 + 2 * 6
    assert lines[1].startswith("unit,0.5,0,")
    assert lines[7].startswith("unit,inf,0,")


# ------------------------------------------------------------------ run_online


def _online(**kw):
    base = dict(
        true_pair=PAIR,
        hypothesized_pair=PAIR,
        window_n=20,
        k_star=50,
        threshold_t=8.0,
        epsilons=(INF,),
        trials=30,
        max_stream_len=90,
        master_seed=0,
        scenario_id="unit-online",
    )
    base.update(kw)
    return OnlineScenario(**base)


def test_online_unreachable_threshold_fails_marginally():
    marginal, conditional = run_online(_online(threshold_t=1e9, trials=10))
    assert np.all(marginal[0].betas == 1.0)
    assert np.all(np.isnan(conditional[0].betas))  # empty conditioning set
    assert marginal[0].no_alarm_fraction == 1.0


def test_online_zero_threshold_pure_post_alarms_immediately():
    scenario = _online(threshold_t=0.0, k_star=11, window_n=20, max_stream_len=40, trials=5)
    # k_star < window start is impossible here: change at 11 >= n/2 = 10;
    # the stream is mostly post-change so the very first query crosses
    marginal, _ = run_online(scenario)
    assert marginal[0].no_alarm_fraction == 0.0


def test_online_curves_monotone_and_paired(tmp_path):
    scenario = _online(trials=40, epsilons=(1.0, INF))
    marginal, conditional = run_online(scenario)
    assert len(marginal) == len(conditional) == 2
    for m, c in zip(marginal, conditional):
        assert np.all(np.diff(m.betas) <= 1e-12)
        valid = ~np.isnan(c.betas)
        assert np.all(np.diff(c.betas[valid]) <= 1e-12)
        assert m.no_alarm_fraction == c.no_alarm_fraction
    out = tmp_path / "o.csv"
    write_online_csv(marginal, conditional, out)
    lines = out.read_text(encoding="utf-8").strip().split("\n")
    assert lines[0] == "scenario,epsilon,alpha,beta1,beta2,no_alarm_fraction"
    assert len(lines) == 1 + 2 * 21


def test_online_rerun_is_bit_identical(tmp_path):
    s = _online(trials=15, epsilons=(0.5,), threshold_t=6.0)
    a, b = tmp_path / "x.csv", tmp_path / "y.csv"
    write_online_csv(*run_online(s), a)
    write_online_csv(*run_online(s), b)
    assert a.read_bytes() == b.read_bytes()


def test_online_scenario_validation():
    with pytest.raises(InvalidParameterError):
        _online(k_star=5)  # below window_n / 2
    with pytest.raises(InvalidParameterError):
        _online(max_stream_len=60)  # < k_star + window_n


# ------------------------------------------------- empirical_threshold_range


def test_quantile_nearest_rank():
    samples = np.arange(1.0, 101.0)
    assert nearest_rank_quantile(samples, 0.5) == 50.0
    with pytest.warns(UserWarning):  # 0.999 of 100 samples is a thin tail
        assert nearest_rank_quantile(samples, 0.999) == 100.0
    with pytest.raises(InvalidParameterError):
        nearest_rank_quantile(samples, 0.0)


def test_quantile_warns_on_thin_tails():
    samples = np.arange(1000.0)
    with pytest.warns(UserWarning):
        nearest_rank_quantile(samples, 0.9999)


class _DownhillPair(BernoulliPair):
    """Test stub: every observation carries log-ratio -1."""

    def log_ratios(self, xs):
        return -np.ones(np.asarray(xs, dtype=float).shape)


def test_threshold_range_nonpositive_ratios_give_nonpositive_low():
    # when no observation ever favours the change, the pre-change CUSUM is
    # pinned at its (negative) last ratio and the low endpoint cannot be > 0
    pair = _DownhillPair(0.2, 0.8)
    rng = np.random.default_rng(0)
    with pytest.warns(UserWarning):  # extreme quantile at 1e3 realizations
        r = empirical_threshold_range(pair, INF, 50, 1000, 0.1, 0.1, 1000, rng)
    assert r.t_low <= 0.0


def test_threshold_range_validation():
    rng = np.random.default_rng(0)
    with pytest.raises(InvalidParameterError):
        empirical_threshold_range(PAIR, INF, 50, 100, 0.0, 0.1, 1000, rng)
    with pytest.raises(InvalidParameterError):
        empirical_threshold_range(PAIR, INF, 50, 100, 0.1, 0.1, 10, rng)
    with pytest.raises(InfiniteSensitivityError):
        empirical_threshold_range(GaussianPair(0, 1), 1.0, 50, 100, 0.1, 0.1, 1000, rng)


def test_threshold_range_gaussian_private_near_empty():
    # with per-step noise at epsilon=1 the range collapses or nearly does,
    # which is what forces relaxed rates for this model
    rng = np.random.default_rng(2)
    pair = GaussianPair(0.0, 1.0)
    with pytest.warns(UserWarning):  # the extreme quantile is thin at 2e3 samples
        r = empirical_threshold_range(
            pair, 1.0, 700, 5000, 0.1, 0.1, 2000, rng, tail_delta=0.05
        )
    with pytest.warns(UserWarning):
        nonprivate = empirical_threshold_range(
            pair, INF, 700, 5000, 0.1, 0.1, 2000, np.random.default_rng(2)
        )
    assert (r.t_high - r.t_low) < (nonprivate.t_high - nonprivate.t_low)


def test_threshold_range_estimates_converge():
    from privcpd import _kernels

    with pytest.warns(UserWarning):  # the 1 - fa/k quantile is always thin here
        small = empirical_threshold_range(
            PAIR, INF, 200, 2000, 0.1, 0.1, 1000, np.random.default_rng(7)
        )
    with pytest.warns(UserWarning):
        big = empirical_threshold_range(
            PAIR, INF, 200, 2000, 0.1, 0.1, 10_000, np.random.default_rng(8)
        )
    # order-statistic confidence band for the miss-rate quantile, from an
    # independent mid-change sample: ranks n*q +- 3 * sqrt(n q (1-q))
    rng = np.random.default_rng(99)
    n_ref, mid = 2000, 100
    pre_block = PAIR.sample(Regime.PRE, rng, size=(n_ref, mid - 1))
    post_block = PAIR.sample(Regime.POST, rng, size=(n_ref, 200 - mid + 1))
    w = np.sort(_kernels.cusum_final(PAIR.log_ratios(np.hstack([pre_block, post_block]))))
    centre = int(n_ref * 0.1)
    half_width = 3.0 * math.sqrt(n_ref * 0.1 * 0.9)
    lo = w[max(int(centre - half_width) - 1, 0)]
    hi = w[min(int(centre + half_width) - 1, n_ref - 1)]
    assert lo <= small.t_high <= hi
    assert lo <= big.t_high <= hi
    assert abs(small.t_low - big.t_low) < 15.0  # extreme quantile: loose check
