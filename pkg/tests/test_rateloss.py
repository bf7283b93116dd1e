import math

import mpmath
import numpy as np
import pytest

from polarook.channel import binary_entropy
from polarook.rateloss import (
    RateLossPoint,
    ccdm_best_composition,
    ccdm_rate_loss,
    ccdm_zero_count,
    dm_only_spec,
    entropy_inverse,
    polar_dm_rate_loss,
    rate_loss_sweep,
    smallest_matching_d,
    sweep_to_csv,
)


def test_polar_dm_loss_zero_at_asymptotic_d():
    p = entropy_inverse(0.5)
    assert polar_dm_rate_loss(1024, p, 512) == pytest.approx(0.0, abs=1e-9)


def test_polar_dm_loss_direct_substitution():
    want = binary_entropy(0.2) - 724 / 1024
    assert polar_dm_rate_loss(1024, 0.2, 300) == pytest.approx(want, abs=1e-15)


def test_polar_dm_loss_increasing_in_d():
    losses = [polar_dm_rate_loss(256, 0.2, d) for d in range(0, 257, 16)]
    assert all(b > a for a, b in zip(losses, losses[1:]))
    with pytest.raises(ValueError):
        polar_dm_rate_loss(256, 0.2, 257)


def test_ccdm_loss_exact_small_cases():
    # C(4,2) = 6, floor(log2 6) = 2
    assert ccdm_rate_loss(4, 0.5) == pytest.approx(0.5, abs=1e-15)
    # N=1: floor(log2 1) = 0, loss = H2(p)
    for p in (0.2, 0.5):
        assert ccdm_rate_loss(1, p) == pytest.approx(binary_entropy(p), abs=1e-15)


def test_ccdm_loss_nonnegative_and_vanishing():
    prev = None
    for n_exp in range(2, 15):
        N = 1 << n_exp
        loss = ccdm_rate_loss(N, 0.5)
        assert loss >= 0.0
        prev = loss
    assert prev < 0.01  # N = 16384


def test_ccdm_loss_against_high_precision_oracle():
    # independent arbitrary-precision floor(log2 C(N, n0))
    for N in range(1, 65):
        for p in (0.1, 0.3, 0.5):
            n0 = ccdm_zero_count(N, p)
            k_oracle = int(mpmath.floor(mpmath.log(mpmath.binomial(N, n0), 2) * (1 + mpmath.mpf("1e-30"))))
            want = binary_entropy(p) - k_oracle / N
            assert ccdm_rate_loss(N, p) == pytest.approx(want, abs=1e-12)


def test_ccdm_zero_count_rounding():
    assert ccdm_zero_count(10, 0.25) == 8  # 7.5 -> ties toward more zeros
    assert ccdm_zero_count(10, 0.24) == 8  # 7.6 -> nearest
    assert ccdm_zero_count(10, 0.26) == 7  # 7.4 -> nearest
    assert ccdm_zero_count(4, 0.5) == 2


def test_entropy_inverse():
    for rate in (0.25, 0.5, 0.9):
        p = entropy_inverse(rate)
        assert p <= 0.5
        assert binary_entropy(p) == pytest.approx(rate, abs=1e-9)


def test_ccdm_best_composition_hits_target():
    n0, rate = ccdm_best_composition(64, 0.5)
    assert rate == pytest.approx(0.5, abs=1e-12)  # C(64,56)=C(64,8), log2 ~ 32.03
    assert n0 == 56


def test_smallest_matching_d_monotone_in_tolerance(stats_cache):
    N, p = 256, entropy_inverse(0.5)
    stats = stats_cache.source_entropies(N, p, trials=20_000, seed=0)
    from polarook.encoder import Argmax

    d_tight = smallest_matching_d(N, p, Argmax(), stats, tolerance=0.004, frames=100, seed=0)
    d_loose = smallest_matching_d(N, p, Argmax(), stats, tolerance=0.02, frames=100, seed=0)
    assert d_loose <= d_tight
    assert d_tight >= N * (1 - binary_entropy(p))


def test_sweep_orderings_small(stats_cache):
    points = rate_loss_sweep(
        [64, 128], target_dm_rate=0.5, list_size=8, frames=100, trials=20_000,
        seed=0, cache=stats_cache,
    )
    table = {(pt.N, pt.matcher): pt.rate_loss for pt in points}
    for N in (64, 128):
        assert table[(N, "ccdm")] <= table[(N, "polar-argmax")] + 1e-12
        assert table[(N, "polar-list8")] <= table[(N, "polar-argmax")] + 1e-12
    assert table[(128, "ccdm")] <= table[(64, "ccdm")] + 1e-12


def test_sweep_csv_format():
    pts = [RateLossPoint(64, "ccdm", None, 0.125, 0.04), RateLossPoint(64, "polar-argmax", 40, 0.11, 0.125)]
    csv = sweep_to_csv(pts)
    lines = csv.strip().split("\n")
    assert lines[0] == "N,matcher,D,p,rate_loss"
    assert lines[1].startswith("64,ccdm,,")
    assert lines[2].startswith("64,polar-argmax,40,")


def test_dm_only_spec_shape(stats_cache):
    stats = stats_cache.source_entropies(64, 0.2, trials=2000, seed=0)
    spec = dm_only_spec(64, 0.2, D=20, source_stats=stats)
    assert spec.dynamic_count == 20
    assert spec.frozen_count == 0
    assert spec.payload_size == 44
