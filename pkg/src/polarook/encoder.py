"""Successive shaped encoding.

Payload and CRC bits go into information positions, frozen positions take
their stored values, and each shaping position is set from the conditional
P(U_i | u_1^{i-1}) computed by the prior-only SC recursion: sampled
(randomized rounding), hard-decided (argmax), or branched over a list that
keeps the lowest-metric prefixes and finally picks the codeword whose
ones-fraction is closest to the target.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .channel import DEFAULT_LLR_CLIP, prior_llr
from .codespec import DYNAMIC, CodeSpec
from .crc import crc_append
from .transform import polar_transform


@dataclass(frozen=True)
class Argmax:
    pass


@dataclass(frozen=True)
class RandomizedRounding:
    seed: int = 0


@dataclass(frozen=True)
class ListEncoding:
    list_size: int = 32
    seed: int = 0  # reserved; list selection is deterministic

    def __post_init__(self):
        ls = self.list_size
        if not (1 <= ls <= 1024 and (ls & (ls - 1)) == 0):
            raise ValueError(f"list_size must be a power of two in [1, 1024], got {ls}")


EncodeRule = Argmax | RandomizedRounding | ListEncoding


def rule_name(rule: EncodeRule) -> str:
    if isinstance(rule, Argmax):
        return "argmax"
    if isinstance(rule, RandomizedRounding):
        return "randomized"
    return "list"


def randomized_round(prob_zero: float, rng: np.random.Generator) -> int:
    """Bernoulli draw consuming exactly one generator value: 0 with the given
    probability, 1 otherwise."""
    if not 0.0 <= prob_zero <= 1.0:
        raise ValueError(f"prob_zero must lie in [0,1], got {prob_zero}")
    return 0 if rng.random() < prob_zero else 1


def _forced_vector(payload, spec: CodeSpec) -> np.ndarray:
    payload = np.asarray(payload, dtype=np.uint8) & 1
    if payload.shape[0] != spec.payload_size:
        raise ValueError(
            f"payload must have {spec.payload_size} bits for this code, got {payload.shape[0]}"
        )
    data = crc_append(payload, spec.crc)
    forced = np.zeros(spec.N, dtype=np.uint8)
    forced[spec.info_positions] = data
    forced[spec.frozen_positions] = spec.frozen_values
    return forced


def _prior_vector(spec: CodeSpec, clip: float = DEFAULT_LLR_CLIP) -> np.ndarray:
    return np.full(spec.N, prior_llr(spec.p_on, clip), dtype=np.float64)


def shaped_encode(payload, spec: CodeSpec, rule: EncodeRule = Argmax()) -> tuple[np.ndarray, np.ndarray]:
    """Encode payload bits into (input vector u, codeword x)."""
    if isinstance(rule, ListEncoding):
        return list_encode(payload, spec, rule.list_size, rule.seed)
    forced = _forced_vector(payload, spec)
    actions = np.full(spec.N, kernels.FORCE, dtype=np.uint8)
    uniforms = None
    if isinstance(rule, Argmax):
        actions[spec.classes == DYNAMIC] = kernels.DECIDE
    elif isinstance(rule, RandomizedRounding):
        actions[spec.classes == DYNAMIC] = kernels.RANDOM
        dyn = spec.dynamic_positions
        uniforms = np.zeros(spec.N, dtype=np.float64)
        # one draw per shaping position, consumed in ascending index order,
        # so a decoder seeded identically can replay the choices
        uniforms[dyn] = np.random.default_rng(rule.seed).random(dyn.shape[0])
    else:
        raise TypeError(f"unsupported encode rule {rule!r}")
    u = kernels.sc_pass(_prior_vector(spec), actions, forced, uniforms=uniforms)
    return u, polar_transform(u)


def list_encode(payload, spec: CodeSpec, list_size: int, seed: int = 0) -> tuple[np.ndarray, np.ndarray]:
    """Branch every shaping position over both bit values, keep the
    `list_size` most probable prefixes, and return the candidate whose
    empirical ones-fraction is closest to the target (ties: lower metric,
    then lower path rank)."""
    ListEncoding(list_size, seed)  # bounds check
    forced = _forced_vector(payload, spec)
    actions = np.full(spec.N, kernels.FORCE, dtype=np.uint8)
    actions[spec.classes == DYNAMIC] = kernels.BRANCH
    us, _metrics = kernels.scl_pass(_prior_vector(spec), actions, forced, list_size)
    xs = np.vstack([polar_transform(row) for row in us])
    mismatch = np.abs(xs.mean(axis=1) - spec.p_on)
    best = int(np.argmin(mismatch))  # rows are metric-ordered; first win = lowest metric
    return us[best], xs[best]
