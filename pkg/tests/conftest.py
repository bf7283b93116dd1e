import numpy as np
import pytest

from polarook.codespec import CodeSpec
from polarook.construction import StatsCache, construct_code
from polarook.crc import CrcConfig


@pytest.fixture(scope="session")
def stats_cache(tmp_path_factory) -> StatsCache:
    return StatsCache(tmp_path_factory.mktemp("stats"))


@pytest.fixture(scope="session")
def spec64(stats_cache) -> CodeSpec:
    """Small shaped code used across functional tests."""
    return construct_code(
        64, 0.5, 0.25, D=14, design_snr_db=3.0,
        crc=CrcConfig(width=8, poly=0x07, init=0),
        trials=4000, seed=1, cache=stats_cache,
    )


@pytest.fixture(scope="session")
def spec64_nocrc(stats_cache) -> CodeSpec:
    return construct_code(
        64, 0.5, 0.25, D=14, design_snr_db=3.0,
        trials=4000, seed=1, cache=stats_cache,
    )


@pytest.fixture(scope="session")
def spec1024(stats_cache) -> CodeSpec:
    """Mid-size shaped code (reduced construction trials for test speed)."""
    return construct_code(
        1024, 0.5, 0.2, D=300, design_snr_db=0.0,
        trials=4000, seed=2, cache=stats_cache,
    )


@pytest.fixture(scope="session")
def uniform128(stats_cache) -> CodeSpec:
    """Plain polar code (no shaping, uniform input)."""
    return construct_code(
        128, 0.5, 0.5, D=0, design_snr_db=2.0,
        trials=6000, seed=3, cache=stats_cache,
    )


@pytest.fixture()
def rng() -> np.random.Generator:
    return np.random.default_rng(12345)
