import numpy as np
import pytest
from scipy import integrate, stats

from polarook.channel import (
    ChannelParams,
    binary_entropy,
    channel_llr,
    channel_sample,
    db_to_linear,
    mutual_information,
    optimize_p,
    prior_llr,
    snr_for_rate,
)


def test_params_validation():
    with pytest.raises(ValueError):
        ChannelParams(1.0, 0.0)
    with pytest.raises(ValueError):
        ChannelParams(-1.0, 0.3)
    p = ChannelParams(2.0, 0.25)
    assert p.snr_linear == pytest.approx(1.0)
    assert p.snr_db == pytest.approx(0.0)


def test_sample_zero_amplitude_is_pure_noise():
    params = ChannelParams(0.0, 0.5)
    x = np.ones(4096)
    y0 = channel_sample(x, params, 7)
    y1 = channel_sample(np.zeros(4096), params, 7)
    assert np.array_equal(y0, y1)


def test_sample_seed_determinism():
    params = ChannelParams(1.0, 0.5)
    x = np.ones(256)
    assert np.array_equal(channel_sample(x, params, 3), channel_sample(x, params, 3))
    assert not np.array_equal(channel_sample(x, params, 3), channel_sample(x, params, 4))


def test_sample_mean_large_n():
    params = ChannelParams(2.0, 0.5)
    y = channel_sample(np.ones(1_000_000), params, 0)
    assert abs(y.mean() - 2.0) < 0.01


def test_llr_midpoint_zero():
    params = ChannelParams(1.7, 0.5)
    assert channel_llr(np.array([1.7 / 2]), params, include_prior=False)[0] == pytest.approx(0.0)


def test_llr_against_density_ratio():
    # numeric Gaussian density ratio as the oracle
    params = ChannelParams(1.0, 0.5)
    got = channel_llr(np.array([0.0]), params, include_prior=False)[0]
    want = np.log(stats.norm.pdf(0.0, loc=0.0) / stats.norm.pdf(0.0, loc=1.0))
    assert got == pytest.approx(want)
    assert got == pytest.approx(0.5)
    for y in (-1.3, 0.2, 2.4):
        got = channel_llr(np.array([y]), params, include_prior=False)[0]
        want = np.log(stats.norm.pdf(y, loc=0.0) / stats.norm.pdf(y, loc=1.0))
        assert got == pytest.approx(want, abs=1e-12)


def test_prior_only_llr():
    assert prior_llr(0.2) == pytest.approx(np.log(4.0))


def test_llr_clipping():
    params = ChannelParams(10.0, 0.5, llr_clip=40.0)
    vals = channel_llr(np.array([-100.0, 100.0]), params, include_prior=False)
    assert vals[0] == 40.0 and vals[1] == -40.0


def test_llr_sign_agreement_with_q_function(rng):
    # hard decisions on a known symbol follow the Q-function error rate
    a, p = 1.5, 0.5
    params = ChannelParams(a, p)
    n = 200_000
    y = channel_sample(np.zeros(n), params, 11)
    llr = channel_llr(y, params, include_prior=False)
    err = np.mean(llr < 0)  # decided "1" though 0 was sent
    q = stats.norm.sf(a / 2)
    assert abs(err - q) < 4 * np.sqrt(q * (1 - q) / n)


def test_mi_limits():
    assert mutual_information(0.5, 1e-9) < 1e-6
    assert mutual_information(0.5, 1e6) > 0.999
    with pytest.raises(ValueError):
        mutual_information(0.0, 1.0)
    with pytest.raises(ValueError):
        mutual_information(0.5, 0.0)


def test_mi_bounded_by_input_entropy():
    for p in (0.1, 0.3, 0.5):
        for g in (0.1, 1.0, 10.0, 1000.0):
            assert mutual_information(p, g) <= binary_entropy(p) + 1e-9


def test_mi_monotone_in_snr():
    for p in (0.2, 0.5):
        vals = [mutual_information(p, g) for g in np.logspace(-2, 2, 25)]
        assert all(b >= a - 1e-9 for a, b in zip(vals, vals[1:]))


def test_mi_against_adaptive_quadrature():
    # independent oracle: adaptive quadrature of the mixture entropy
    for p, gamma in ((0.5, 1.0), (0.25, 0.5), (0.11, 2.0)):
        a = np.sqrt(gamma / p)

        def fy(y):
            return (1 - p) * stats.norm.pdf(y) + p * stats.norm.pdf(y - a)

        def integrand(y):
            f = fy(y)
            return -f * np.log2(f) if f > 0 else 0.0

        h_y, _ = integrate.quad(integrand, -12, a + 12, limit=300)
        want = h_y - 0.5 * np.log2(2 * np.pi * np.e)
        assert mutual_information(p, gamma) == pytest.approx(want, abs=1e-4)


def test_optimize_p_large_snr_approaches_half():
    # coarse grid oracle agrees with the optimizer
    gamma = 1000.0
    grid = np.arange(0.01, 0.51, 0.01)
    oracle = grid[np.argmax([mutual_information(p, gamma) for p in grid])]
    p_star, _ = optimize_p(gamma)
    assert abs(p_star - oracle) < 0.02
    assert p_star > 0.45


def test_optimize_p_dominates_uniform():
    for g in (0.1, 0.5, 1.0, 4.0):
        _, rate = optimize_p(g)
        assert rate >= mutual_information(0.5, g) - 1e-9


def test_optimize_p_grid_density_invariance():
    gamma = db_to_linear(-1.25)
    p1, r1 = optimize_p(gamma, p_resolution=1e-4)
    p2, r2 = optimize_p(gamma, p_resolution=5e-5)
    assert abs(p1 - p2) < 5e-4
    assert abs(r1 - r2) < 1e-6


def test_two_db_gap_at_quarter_rate():
    gap = snr_for_rate(0.25, shaped=False) - snr_for_rate(0.25, shaped=True)
    assert 1.8 <= gap <= 2.2
