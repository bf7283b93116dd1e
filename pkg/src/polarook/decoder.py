"""SC and CRC-aided SCL decoding of shaped codewords.

The practical receiver treats shaping positions like ordinary unknown bits:
their prior-only conditionals are nearly deterministic, so the channel
recursion resolves them essentially for free. The encoder-mimicking variant
instead replays the encoder's prior-only recursion and RNG draws; it exists
to validate the construction and demonstrates error propagation when a
prefix decision is wrong.
"""

from __future__ import annotations

import numpy as np

from . import kernels
from .channel import DEFAULT_LLR_CLIP, prior_llr
from .codespec import FROZEN, CodeSpec
from .crc import crc_check


def _payload_of(u: np.ndarray, spec: CodeSpec) -> np.ndarray:
    data = u[spec.info_positions]
    return data[: spec.payload_size]


def sc_decode(y_llrs, spec: CodeSpec) -> tuple[np.ndarray, np.ndarray]:
    """Single-path decode; y_llrs must already include the prior term."""
    y_llrs = np.asarray(y_llrs, dtype=np.float64)
    if y_llrs.shape[0] != spec.N:
        raise ValueError(f"expected {spec.N} channel LLRs, got {y_llrs.shape[0]}")
    actions = np.full(spec.N, kernels.DECIDE, dtype=np.uint8)
    actions[spec.classes == FROZEN] = kernels.FORCE
    forced = np.zeros(spec.N, dtype=np.uint8)
    forced[spec.frozen_positions] = spec.frozen_values
    u_hat = kernels.sc_pass(y_llrs, actions, forced)
    return u_hat, _payload_of(u_hat, spec)


def scl_decode(y_llrs, spec: CodeSpec, list_size: int) -> tuple[np.ndarray, np.ndarray, bool]:
    """List decode; answer is the lowest-metric path whose payload passes the
    CRC, falling back to the lowest-metric path with crc_ok=False."""
    y_llrs = np.asarray(y_llrs, dtype=np.float64)
    if y_llrs.shape[0] != spec.N:
        raise ValueError(f"expected {spec.N} channel LLRs, got {y_llrs.shape[0]}")
    if list_size < 1:
        raise ValueError("list_size must be >= 1")
    actions = np.full(spec.N, kernels.BRANCH, dtype=np.uint8)
    actions[spec.classes == FROZEN] = kernels.FORCE
    forced = np.zeros(spec.N, dtype=np.uint8)
    forced[spec.frozen_positions] = spec.frozen_values
    us, _metrics = kernels.scl_pass(y_llrs, actions, forced, list_size)
    for row in us:  # metric order
        data = row[spec.info_positions]
        if crc_check(data, spec.crc):
            return row, data[: spec.payload_size], True
    return us[0], _payload_of(us[0], spec), False


def mimic_encoder_decode(y_llrs, spec: CodeSpec, shared_seed: int, clip: float = DEFAULT_LLR_CLIP) -> np.ndarray:
    """Decode with shaping positions reconstructed by replaying the encoder's
    randomized-rounding draws on the decoded prefix. Requires the frame to
    have been encoded with RandomizedRounding(shared_seed)."""
    y_llrs = np.asarray(y_llrs, dtype=np.float64)
    if y_llrs.shape[0] != spec.N:
        raise ValueError(f"expected {spec.N} channel LLRs, got {y_llrs.shape[0]}")
    actions = np.full(spec.N, kernels.DECIDE, dtype=np.uint8)
    actions[spec.classes == FROZEN] = kernels.FORCE
    dyn = spec.dynamic_positions
    actions[dyn] = kernels.RANDOM
    forced = np.zeros(spec.N, dtype=np.uint8)
    forced[spec.frozen_positions] = spec.frozen_values
    uniforms = np.zeros(spec.N, dtype=np.float64)
    uniforms[dyn] = np.random.default_rng(shared_seed).random(dyn.shape[0])
    return kernels.mimic_pass(y_llrs, prior_llr(spec.p_on, clip), actions, forced, uniforms)
