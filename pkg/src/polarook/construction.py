"""Monte Carlo code construction.

Two per-index orderings are estimated: the prefix-conditional source entropy
(how deterministic an input bit is given everything before it) and a
genie-aided channel error counter (how reliable the bit is under SC at the
design SNR). The shaping set takes the lowest source entropies, the frozen
set the worst channel counters among the rest, and whatever remains carries
information.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import kernels
from .channel import ChannelParams, channel_llr, db_to_linear, prior_llr
from .codespec import DYNAMIC, FROZEN, INFO, CodeSpec
from .crc import CrcConfig
from .transform import polar_transform

STATS_FORMAT_VERSION = 1

DEFAULT_SOURCE_TRIALS = 100_000
DEFAULT_CHANNEL_TRIALS = 100_000
LARGE_N_TRIALS = 10_000  # cost control above N=4096


def default_trials(N: int) -> int:
    return DEFAULT_SOURCE_TRIALS if N <= 4096 else LARGE_N_TRIALS


@dataclass
class PolarizationStats:
    N: int
    p_on: float
    source_entropy: np.ndarray | None = None  # bits, per index
    source_trials: int = 0
    channel_errors: np.ndarray | None = None  # genie SC error counts, per index
    channel_trials: int = 0
    design_snr_db: float | None = None
    seed: int = 0

    def merged_with(self, other: "PolarizationStats") -> "PolarizationStats":
        """Combine a source-only and a channel-only estimate for one code."""
        if (self.N, self.p_on) != (other.N, other.p_on):
            raise ValueError("cannot merge statistics of different codes")
        out = PolarizationStats(self.N, self.p_on, seed=self.seed)
        for a in (self, other):
            if a.source_entropy is not None:
                out.source_entropy = a.source_entropy
                out.source_trials = a.source_trials
            if a.channel_errors is not None:
                out.channel_errors = a.channel_errors
                out.channel_trials = a.channel_trials
                out.design_snr_db = a.design_snr_db
        return out


def _trial_rng(seed: int, stream: int, trial: int) -> np.random.Generator:
    # one independent stream per trial, so results do not depend on how
    # trials are split across workers
    return np.random.default_rng([seed, stream, trial])


def estimate_source_entropies(N: int, p: float, trials: int, seed: int = 0) -> PolarizationStats:
    """Sample-mean estimate of the prefix-conditional entropy of every input
    bit, in bits: inputs are drawn by randomized rounding from the prior-only
    recursion and their surprisals averaged."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    llr0 = np.full(N, prior_llr(p), dtype=np.float64)
    actions = np.full(N, kernels.RANDOM, dtype=np.uint8)
    forced = np.zeros(N, dtype=np.uint8)
    surprisal = np.zeros(N, dtype=np.float64)
    acc = np.zeros(N, dtype=np.float64)
    for t in range(trials):
        uniforms = _trial_rng(seed, 0, t).random(N)
        kernels.sc_pass(llr0, actions, forced, uniforms=uniforms, out_surprisal=surprisal)
        acc += surprisal
    return PolarizationStats(N, p, source_entropy=acc / trials, source_trials=trials, seed=seed)


def estimate_channel_reliability(
    N: int, p: float, design_snr_db: float, trials: int, seed: int = 0
) -> PolarizationStats:
    """Genie-aided SC error counters at the design SNR: each trial transmits
    a freshly shaped input (no frozen constraints), decodes with every
    decision corrected to the truth, and counts first-shot mismatches."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    amplitude = float(np.sqrt(db_to_linear(design_snr_db) / p))
    params = ChannelParams(amplitude, p)
    prior_vec = np.full(N, prior_llr(p), dtype=np.float64)
    gen_actions = np.full(N, kernels.RANDOM, dtype=np.uint8)
    genie_actions = np.full(N, kernels.GENIE, dtype=np.uint8)
    zeros = np.zeros(N, dtype=np.uint8)
    errors = np.zeros(N, dtype=np.int64)
    err = np.zeros(N, dtype=np.uint8)
    for t in range(trials):
        rng = _trial_rng(seed, 1, t)
        u = kernels.sc_pass(prior_vec, gen_actions, zeros, uniforms=rng.random(N))
        x = polar_transform(u)
        y = amplitude * x + rng.standard_normal(N)
        llrs = channel_llr(y, params, include_prior=True)
        err[:] = 0
        kernels.sc_pass(llrs, genie_actions, u, out_error=err)
        errors += err
    return PolarizationStats(
        N,
        p,
        channel_errors=errors,
        channel_trials=trials,
        design_snr_db=design_snr_db,
        seed=seed,
    )


def build_code_spec(
    N: int,
    rate: float,
    p: float,
    D: int,
    stats: PolarizationStats,
    crc: CrcConfig | None = None,
    seed: int = 0,
    design_snr_db: float | None = None,
) -> CodeSpec:
    """Select the index classes under the budget |shaping| + |frozen| = N - K.

    Shaping set: D smallest source entropies. Frozen set: largest channel
    error counts among the remaining indices. Ties always break toward the
    lower index, so a given statistics object yields one spec.
    """
    if crc is None:
        crc = CrcConfig(width=0, poly=0x1, init=0)
    if stats.source_entropy is None and D > 0:
        raise ValueError("source-entropy statistics required for a nonzero shaping set")
    k = round(N * rate)
    budget = N - k
    if not 0 <= D <= budget:
        raise ValueError(f"shaping set size {D} outside [0, {budget}]")
    if stats.channel_errors is None and budget - D > 0:
        raise ValueError("channel statistics required for a nonzero frozen set")

    classes = np.full(N, INFO, dtype=np.uint8)
    if D > 0:
        dyn = np.argsort(stats.source_entropy, kind="stable")[:D]
        classes[dyn] = DYNAMIC
    n_frozen = budget - D
    if n_frozen > 0:
        avail = np.flatnonzero(classes != DYNAMIC)
        order = np.argsort(-stats.channel_errors[avail], kind="stable")
        classes[avail[order[:n_frozen]]] = FROZEN

    frozen_values = np.random.default_rng([seed, 2]).integers(0, 2, size=n_frozen).astype(np.uint8)
    if design_snr_db is None:
        design_snr_db = stats.design_snr_db
    spec = CodeSpec(
        N=N,
        rate=rate,
        p_on=p,
        classes=classes,
        frozen_values=frozen_values,
        crc=crc,
        design_snr_db=design_snr_db,
        seed=seed,
        meta={
            "source_trials": stats.source_trials,
            "channel_trials": stats.channel_trials,
            "stats_seed": stats.seed,
            # CRC bits live in information positions and count against the
            # transmission rate; recorded so results are reproducible under
            # either accounting convention
            "crc_in_information_positions": crc.width > 0,
        },
    )
    spec.validate()
    return spec


class StatsCache:
    """Content-addressed cache of Monte Carlo statistics (.npz files).

    Construction is the expensive offline step; everything downstream loads
    from here when the (kind, N, p, design SNR, trials, seed) key matches.
    """

    def __init__(self, directory):
        self.directory = Path(directory)
        self.directory.mkdir(parents=True, exist_ok=True)

    def _path(self, key: dict) -> Path:
        blob = json.dumps(key, sort_keys=True, separators=(",", ":")).encode()
        return self.directory / f"stats_{hashlib.sha256(blob).hexdigest()[:16]}.npz"

    def source_entropies(self, N: int, p: float, trials: int, seed: int = 0) -> PolarizationStats:
        key = {
            "version": STATS_FORMAT_VERSION,
            "kind": "source",
            "N": N,
            "p": p,
            "trials": trials,
            "seed": seed,
        }
        path = self._path(key)
        if path.exists():
            data = np.load(path)
            return PolarizationStats(
                N, p, source_entropy=data["values"], source_trials=trials, seed=seed
            )
        stats = estimate_source_entropies(N, p, trials, seed)
        np.savez(path, values=stats.source_entropy, key=json.dumps(key))
        return stats

    def channel_reliability(
        self, N: int, p: float, design_snr_db: float, trials: int, seed: int = 0
    ) -> PolarizationStats:
        key = {
            "version": STATS_FORMAT_VERSION,
            "kind": "channel",
            "N": N,
            "p": p,
            "design_snr_db": design_snr_db,
            "trials": trials,
            "seed": seed,
        }
        path = self._path(key)
        if path.exists():
            data = np.load(path)
            return PolarizationStats(
                N,
                p,
                channel_errors=data["values"],
                channel_trials=trials,
                design_snr_db=design_snr_db,
                seed=seed,
            )
        stats = estimate_channel_reliability(N, p, design_snr_db, trials, seed)
        np.savez(path, values=stats.channel_errors, key=json.dumps(key))
        return stats


def construct_code(
    N: int,
    rate: float,
    p: float,
    D: int,
    design_snr_db: float,
    crc: CrcConfig | None = None,
    trials: int | None = None,
    seed: int = 0,
    cache: StatsCache | None = None,
) -> CodeSpec:
    """One-call construction with optional caching of the Monte Carlo step."""
    if trials is None:
        trials = default_trials(N)
    if cache is None:
        src = estimate_source_entropies(N, p, trials, seed) if D > 0 else PolarizationStats(N, p)
        ch = estimate_channel_reliability(N, p, design_snr_db, trials, seed)
    else:
        src = cache.source_entropies(N, p, trials, seed) if D > 0 else PolarizationStats(N, p)
        ch = cache.channel_reliability(N, p, design_snr_db, trials, seed)
    stats = src.merged_with(ch)
    spec = build_code_spec(N, rate, p, D, stats, crc=crc, seed=seed, design_snr_db=design_snr_db)
    spec.meta["construction_trials"] = trials
    return spec
