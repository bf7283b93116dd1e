"""Shaped polar coding for on-off keying over AWGN.

A polar code performs distribution matching and error correction jointly:
information positions carry uniform data, shaping positions are driven by
the prefix-conditional input distribution, and the decoder treats shaped
positions as ordinary unknown bits. Includes achievable-rate analytics,
matcher rate-loss tools, and a Monte Carlo FER harness.
"""

from .channel import ChannelParams, channel_llr, channel_sample, mutual_information, optimize_p
from .codespec import CodeSpec
from .construction import (
    PolarizationStats,
    StatsCache,
    build_code_spec,
    construct_code,
    estimate_channel_reliability,
    estimate_source_entropies,
)
from .crc import CrcConfig, crc_append, crc_check, crc_compute
from .decoder import mimic_encoder_decode, sc_decode, scl_decode
from .encoder import Argmax, ListEncoding, RandomizedRounding, list_encode, randomized_round, shaped_encode
from .harness import DecodeConfig, SimRecord, StopRule, normalize_amplitude, run_fer_point, run_sweep
from .rateloss import ccdm_rate_loss, polar_dm_rate_loss, rate_loss_sweep
from .transform import polar_transform

__version__ = "0.1.0"

__all__ = [
    "ChannelParams",
    "CodeSpec",
    "CrcConfig",
    "PolarizationStats",
    "StatsCache",
    "Argmax",
    "ListEncoding",
    "RandomizedRounding",
    "DecodeConfig",
    "SimRecord",
    "StopRule",
    "build_code_spec",
    "ccdm_rate_loss",
    "channel_llr",
    "channel_sample",
    "construct_code",
    "crc_append",
    "crc_check",
    "crc_compute",
    "estimate_channel_reliability",
    "estimate_source_entropies",
    "list_encode",
    "mimic_encoder_decode",
    "mutual_information",
    "normalize_amplitude",
    "optimize_p",
    "polar_dm_rate_loss",
    "polar_transform",
    "randomized_round",
    "rate_loss_sweep",
    "run_fer_point",
    "run_sweep",
    "sc_decode",
    "scl_decode",
    "shaped_encode",
    "__version__",
]
