import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from privcpd import (
    BernoulliPair,
    GaussianPair,
    InvalidObservationError,
    InvalidParameterError,
    Regime,
    bisect_a_delta,
)

LN4 = math.log(4.0)


# ---------------------------------------------------------------- construction


@pytest.mark.parametrize("p0,p1", [(0.0, 0.5), (1.0, 0.5), (0.5, 0.5), (-0.1, 0.5), (0.3, 1.5)])
def test_bernoulli_rejects_bad_probabilities(p0, p1):
    with pytest.raises(InvalidParameterError):
        BernoulliPair(p0, p1)


def test_gaussian_rejects_equal_or_nonfinite_means():
    with pytest.raises(InvalidParameterError):
        GaussianPair(1.0, 1.0)
    with pytest.raises(InvalidParameterError):
        GaussianPair(0.0, math.inf)


def test_pairs_are_immutable():
    pair = BernoulliPair(0.2, 0.8)
    with pytest.raises(AttributeError):
        pair.p0 = 0.3


# ------------------------------------------------------------------- log_ratio


def test_bernoulli_log_ratio_values():
    pair = BernoulliPair(0.2, 0.8)
    assert pair.log_ratio(1.0) == pytest.approx(LN4, abs=1e-12)
    assert pair.log_ratio(0.0) == pytest.approx(-LN4, abs=1e-12)


def test_bernoulli_log_ratio_rejects_off_support():
    pair = BernoulliPair(0.2, 0.8)
    with pytest.raises(InvalidObservationError):
        pair.log_ratio(0.5)
    with pytest.raises(InvalidObservationError) as exc:
        pair.log_ratios([0.0, 1.0, 2.0, 1.0])
    assert exc.value.index == 3


def test_gaussian_log_ratio_midpoint_is_zero():
    assert GaussianPair(0.0, 1.0).log_ratio(0.5) == 0.0


@settings(max_examples=60, deadline=None)
@given(
    p0=st.floats(0.01, 0.99),
    p1=st.floats(0.01, 0.99),
    x=st.sampled_from([0.0, 1.0]),
)
def test_bernoulli_swap_antisymmetry(p0, p1, x):
    if p0 == p1:
        return
    pair = BernoulliPair(p0, p1)
    assert pair.swapped().log_ratio(x) == pytest.approx(-pair.log_ratio(x), abs=1e-12)


@settings(max_examples=60, deadline=None)
@given(
    mu0=st.floats(-5, 5),
    mu1=st.floats(-5, 5),
    x=st.floats(-20, 20),
)
def test_gaussian_swap_antisymmetry(mu0, mu1, x):
    if mu0 == mu1:
        return
    pair = GaussianPair(mu0, mu1)
    assert pair.swapped().log_ratio(x) == -pair.log_ratio(x)


# ------------------------------------------------------------------- delta_ell


def test_delta_ell_values():
    assert BernoulliPair(0.2, 0.8).delta_ell() == pytest.approx(math.log(16.0), abs=1e-12)
    # extrema over {0, 1}: log 2 + log(4/3)
    assert BernoulliPair(0.2, 0.4).delta_ell() == pytest.approx(0.9808292530117264, abs=1e-12)
    assert GaussianPair(0.0, 1.0).delta_ell() == math.inf


# --------------------------------------------------------------------- a_delta


def test_a_delta_gaussian_closed_form():
    # 2 * (quantile(0.975) + 0.5) with the standard-normal quantile oracle
    assert GaussianPair(0.0, 1.0).a_delta(0.05) == pytest.approx(4.919927969080108, abs=1e-9)


def test_a_delta_gaussian_matches_bisection():
    pair = GaussianPair(0.0, 1.0)
    assert bisect_a_delta(pair, 0.05) == pytest.approx(pair.a_delta(0.05), abs=1e-6)
    pair = GaussianPair(-1.5, 0.5)
    assert bisect_a_delta(pair, 0.2) == pytest.approx(pair.a_delta(0.2), abs=1e-6)


def test_a_delta_bernoulli_smallest_feasible_support_point():
    # symmetric pair: both support points sit at 2*ln4, so that is the answer
    assert BernoulliPair(0.2, 0.8).a_delta(0.05) == pytest.approx(2 * LN4, abs=1e-12)
    # asymmetric pair: large delta can stop at the smaller support point
    pair = BernoulliPair(0.2, 0.4)
    small, big = sorted([2 * abs(pair.log_ratio(0.0)), 2 * abs(pair.log_ratio(1.0))])
    assert pair.a_delta(0.05) == pytest.approx(big, abs=1e-12)
    assert pair.a_delta(0.9) == pytest.approx(small, abs=1e-12)
    assert bisect_a_delta(pair, 0.05) == pytest.approx(big, abs=1e-6)


def test_a_delta_rejects_bad_delta():
    pair = GaussianPair(0.0, 1.0)
    for delta in (0.0, 1.0, -0.1, 1.5):
        with pytest.raises(InvalidParameterError):
            pair.a_delta(delta)


@pytest.mark.parametrize(
    "pair", [BernoulliPair(0.2, 0.8), BernoulliPair(0.2, 0.4), GaussianPair(0.0, 1.0)]
)
def test_a_delta_non_increasing_in_delta(pair):
    deltas = [0.01, 0.05, 0.1, 0.3, 0.6, 0.9]
    values = [pair.a_delta(d) for d in deltas]
    assert all(a >= b - 1e-12 for a, b in zip(values, values[1:]))


# ---------------------------------------------------------------- kl_constants


def test_bernoulli_kl_constants_frozen():
    c, c_m = BernoulliPair(0.2, 0.8).kl_constants()
    assert c == pytest.approx(0.8317766166719343, abs=1e-12)  # 0.6 * ln 4
    assert c_m == pytest.approx(0.1927447570217575, abs=1e-9)


def test_bernoulli_kl_matches_two_point_summation():
    for p0, p1 in [(0.2, 0.8), (0.2, 0.4), (0.77, 0.11)]:
        pair = BernoulliPair(p0, p1)
        c, c_m = pair.kl_constants()

        def kl(pa, pb):
            return pa * math.log(pa / pb) + (1 - pa) * math.log((1 - pa) / (1 - pb))

        m = 0.5 * (p0 + p1)
        assert c == pytest.approx(min(kl(p0, p1), kl(p1, p0)), abs=1e-12)
        assert c_m == pytest.approx(min(kl(p0, m), kl(p1, m)), abs=1e-12)


def test_gaussian_kl_constants():
    c, c_m = GaussianPair(0.0, 1.0).kl_constants()
    assert c == pytest.approx(0.5, abs=1e-9)
    assert c_m == pytest.approx(_gauss_mixture_kl_oracle(0.0, 1.0), abs=1e-6)
    c, _ = GaussianPair(1.0, -2.0).kl_constants()
    assert c == pytest.approx(4.5, abs=1e-9)


def _gauss_mixture_kl_oracle(mu0, mu1):
    # Gauss-Hermite quadrature, independent of the adaptive integrator used
    # by the implementation.
    t, w = np.polynomial.hermite.hermgauss(200)
    values = []
    for mean, sign in ((mu0, 1.0), (mu1, -1.0)):
        x = mean + math.sqrt(2.0) * t
        r = (mu1 - mu0) * (x - 0.5 * (mu0 + mu1))
        f = math.log(2.0) - np.logaddexp(0.0, sign * r)
        values.append(float(np.sum(w * f) / math.sqrt(math.pi)))
    return min(values)


@settings(max_examples=20, deadline=None)
@given(p0=st.floats(0.02, 0.98), p1=st.floats(0.02, 0.98))
def test_cm_bounded_by_log2(p0, p1):
    if p0 == p1:
        return
    _, c_m = BernoulliPair(p0, p1).kl_constants()
    assert 0.0 <= c_m <= math.log(2.0)


@pytest.mark.parametrize("shift", [0.1, 1.0, 3.0, 8.0])
def test_gaussian_cm_bounded_by_log2(shift):
    _, c_m = GaussianPair(0.0, shift).kl_constants()
    assert 0.0 <= c_m <= math.log(2.0)


# -------------------------------------------------------------------- sampling


def test_bernoulli_sampling_moments():
    pair = BernoulliPair(0.2, 0.8)
    rng = np.random.default_rng(7)
    pre = pair.sample(Regime.PRE, rng, size=100_000)
    assert set(np.unique(pre)) <= {0.0, 1.0}
    assert pre.mean() == pytest.approx(0.2, abs=0.01)
    post = pair.sample(Regime.POST, rng, size=100_000)
    assert post.mean() == pytest.approx(0.8, abs=0.01)


def test_gaussian_sampling_moments():
    pair = GaussianPair(0.0, 1.0)
    rng = np.random.default_rng(11)
    post = pair.sample(Regime.POST, rng, size=100_000)
    assert post.mean() == pytest.approx(1.0, abs=0.02)
    assert post.var() == pytest.approx(1.0, abs=0.05)


def test_sampling_is_deterministic_given_rng_state():
    pair = GaussianPair(0.0, 1.0)
    a = pair.sample(Regime.PRE, np.random.default_rng(3), size=10)
    b = pair.sample(Regime.PRE, np.random.default_rng(3), size=10)
    np.testing.assert_array_equal(a, b)
    assert pair.sample(Regime.POST, np.random.default_rng(3)) == pytest.approx(
        float(pair.sample(Regime.POST, np.random.default_rng(3)))
    )
