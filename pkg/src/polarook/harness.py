"""End-to-end frame-error-rate experiments.

One point = (code, encode rule, decode config, target SNR): frames are
encoded, scaled to the target SNR via the measured codeword distribution,
sent over the channel, decoded, and compared on payload bits. Per-frame
seeds derive from (master seed, frame index), so any frame is reproducible
in isolation and totals do not depend on how frames are batched.
"""

from __future__ import annotations

import hashlib
import json
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .channel import ChannelParams, channel_llr, db_to_linear
from .codespec import CodeSpec
from .construction import StatsCache, construct_code, default_trials
from .crc import default_crc
from .decoder import sc_decode, scl_decode
from .encoder import Argmax, EncodeRule, ListEncoding, RandomizedRounding, rule_name, shaped_encode

CSV_COLUMNS = [
    "config_hash", "N", "R", "D", "rule", "list_enc", "list_dec", "crc",
    "snr_db", "amplitude", "frames", "frame_errors", "bit_errors", "fer",
    "ber", "seed",
]

POWER_CONVENTIONS = ("second_moment", "squared_mean")


@dataclass
class StopRule:
    max_frames: int = 1_000_000
    min_frame_errors: int = 100

    def __post_init__(self):
        if self.max_frames < 1 or self.min_frame_errors < 1:
            raise ValueError("stop criteria must be positive")


@dataclass
class DecodeConfig:
    list_size: int = 1  # 1 = plain SC


@dataclass
class SimRecord:
    code_id: str
    N: int
    rate: float
    D: int
    rule: str
    list_enc: int
    list_dec: int
    crc_width: int
    snr_db: float
    amplitude: float
    frames: int
    frame_errors: int
    bit_errors: int
    seed: int
    wall_time_s: float = 0.0

    @property
    def fer(self) -> float:
        return self.frame_errors / self.frames

    def csv_row(self, payload_bits: int, config_hash: str | None = None) -> str:
        ber = self.bit_errors / (self.frames * payload_bits)
        vals = [
            config_hash or self.code_id, str(self.N), repr(self.rate), str(self.D), self.rule,
            str(self.list_enc), str(self.list_dec), str(self.crc_width),
            repr(self.snr_db), repr(self.amplitude), str(self.frames),
            str(self.frame_errors), str(self.bit_errors),
            repr(self.frame_errors / self.frames), repr(ber), str(self.seed),
        ]
        return ",".join(vals)


def normalize_amplitude(
    spec: CodeSpec,
    target_snr_db: float,
    empirical_p: float,
    power_convention: str = "second_moment",
    mean_square_profile: float | None = None,
) -> float:
    """Amplitude hitting the target SNR for the measured distribution.

    second_moment: gamma = p * a^2 (transmit power equals the SNR).
    squared_mean: gamma = a^2 * mean_i E[X_i]^2, which squares the
    per-position means; needs the mean-square profile estimate.
    """
    gamma = db_to_linear(target_snr_db)
    if power_convention == "second_moment":
        if empirical_p <= 0.0:
            raise ValueError("empirical ones-fraction must be positive")
        return float(np.sqrt(gamma / empirical_p))
    if power_convention == "squared_mean":
        msq = mean_square_profile
        if msq is None or msq <= 0.0:
            raise ValueError("squared_mean convention needs the mean-square profile")
        return float(np.sqrt(gamma / msq))
    raise ValueError(f"power_convention must be one of {POWER_CONVENTIONS}")


def measure_empirical_p(spec: CodeSpec, rule: EncodeRule, frames: int, seed: int) -> tuple[float, float]:
    """Mean ones-fraction and mean-square of per-position means, over
    `frames` encodings with payloads drawn from a seed-derived stream."""
    if frames < 100:
        raise ValueError("distribution estimate needs at least 100 frames")
    mean_x = np.zeros(spec.N, dtype=np.float64)
    for k in range(frames):
        rng = np.random.default_rng([seed, 10, k])
        payload = rng.integers(0, 2, spec.payload_size).astype(np.uint8)
        _, x = shaped_encode(payload, spec, _frame_rule(rule, rng))
        mean_x += x
    mean_x /= frames
    return float(mean_x.mean()), float(np.mean(mean_x**2))


def _frame_rule(rule: EncodeRule, rng: np.random.Generator) -> EncodeRule:
    # randomized rounding draws fresh per-frame shaping randomness from the
    # frame stream so frames are independent yet reproducible
    if isinstance(rule, RandomizedRounding):
        return RandomizedRounding(int(rng.integers(0, 2**63 - 1)))
    return rule


def run_frame(
    spec: CodeSpec,
    rule: EncodeRule,
    decode_cfg: DecodeConfig,
    amplitude: float,
    master_seed: int,
    frame_index: int,
) -> tuple[int, int, int]:
    """One frame; returns (frame_error, payload_bit_errors, crc_miss)."""
    rng = np.random.default_rng([master_seed, 11, frame_index])
    payload = rng.integers(0, 2, spec.payload_size).astype(np.uint8)
    _, x = shaped_encode(payload, spec, _frame_rule(rule, rng))
    params = ChannelParams(amplitude, spec.p_on)
    y = amplitude * x + rng.standard_normal(spec.N)
    llrs = channel_llr(y, params, include_prior=True)
    if decode_cfg.list_size <= 1 and spec.crc.width == 0:
        _, payload_hat = sc_decode(llrs, spec)
        crc_miss = 0
    else:
        _, payload_hat, crc_ok = scl_decode(llrs, spec, max(decode_cfg.list_size, 1))
        crc_miss = 0 if crc_ok else 1
    bit_errors = int(np.count_nonzero(payload_hat != payload))
    return (1 if bit_errors else 0), bit_errors, crc_miss


def run_fer_point(
    spec: CodeSpec,
    rule: EncodeRule,
    decode_cfg: DecodeConfig,
    snr_db: float,
    stop: StopRule,
    seed: int,
    power_convention: str = "second_moment",
    empirical: tuple[float, float] | None = None,
    p_measure_frames: int = 200,
) -> SimRecord:
    """Frames until min_frame_errors or max_frames, whichever first."""
    t0 = time.perf_counter()
    if empirical is None:
        empirical = measure_empirical_p(spec, rule, p_measure_frames, seed)
    p_emp, msq = empirical
    amplitude = normalize_amplitude(spec, snr_db, p_emp, power_convention, msq)
    frames = frame_errors = bit_errors = 0
    while frames < stop.max_frames and frame_errors < stop.min_frame_errors:
        fe, be, _ = run_frame(spec, rule, decode_cfg, amplitude, seed, frames)
        frames += 1
        frame_errors += fe
        bit_errors += be
    return SimRecord(
        code_id=spec.content_hash(),
        N=spec.N,
        rate=spec.rate,
        D=spec.dynamic_count,
        rule=rule_name(rule),
        list_enc=rule.list_size if isinstance(rule, ListEncoding) else 1,
        list_dec=decode_cfg.list_size,
        crc_width=spec.crc.width,
        snr_db=snr_db,
        amplitude=amplitude,
        frames=frames,
        frame_errors=frame_errors,
        bit_errors=bit_errors,
        seed=seed,
        wall_time_s=time.perf_counter() - t0,
    )


# ------------------------------------------------------------------- sweeps

class ConfigError(ValueError):
    pass


def _require(cfg: dict, block: str, key: str):
    if key not in cfg:
        raise ConfigError(f"config block '{block}' is missing field '{key}'")
    return cfg[key]


def parse_rule(encode_cfg: dict) -> EncodeRule:
    name = encode_cfg.get("rule", "argmax")
    if name == "argmax":
        return Argmax()
    if name == "randomized":
        return RandomizedRounding(int(encode_cfg.get("seed", 0)))
    if name == "list":
        return ListEncoding(int(encode_cfg.get("list_size", 32)))
    raise ConfigError(f"unknown encode rule '{name}' (argmax|randomized|list)")


def load_config(path) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    try:
        cfg = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: line {exc.lineno}, {exc.msg}") from exc
    for block in ("code", "sweep"):
        if block not in cfg:
            raise ConfigError(f"config is missing the '{block}' block")
    code = cfg["code"]
    _require(code, "code", "N")
    _require(code, "code", "R")
    if "p" not in code and "design_snr_db" not in code:
        raise ConfigError("config block 'code' needs 'p' or 'design_snr_db'")
    _require(cfg["sweep"], "sweep", "snr_db")
    return cfg


def spec_from_config(cfg: dict, cache: StatsCache | None = None) -> CodeSpec:
    code = cfg["code"]
    N = int(code["N"])
    R = float(code["R"])
    if "p" in code:
        p = float(code["p"])
        design = float(code.get("design_snr_db", 0.0)) if "design_snr_db" in code else None
    else:
        from .channel import optimize_p

        design = float(code["design_snr_db"])
        p = optimize_p(db_to_linear(design))[0]
    if design is None:
        design = float(code.get("design_snr_db", 0.0))
    D = int(code.get("D", 0))
    crc = default_crc(int(code.get("crc_width", 0)))
    trials = int(code.get("trials", default_trials(N)))
    seed = int(cfg.get("seed", 0))
    return construct_code(N, R, p, D, design, crc=crc, trials=trials, seed=seed, cache=cache)


def run_sweep(
    cfg: dict,
    out_csv,
    cache: StatsCache | None = None,
    spec: CodeSpec | None = None,
    log_jsonl=None,
) -> list[SimRecord]:
    """Execute every (code, SNR) point, appending rows to the CSV.

    Existing (config_hash, snr_db) rows are skipped, so an interrupted sweep
    resumes by rerunning the same command.
    """
    if spec is None:
        spec = spec_from_config(cfg, cache)
    rule = parse_rule(cfg.get("encode", {}))
    decode_cfg = DecodeConfig(list_size=int(cfg.get("decode", {}).get("list_size", 1)))
    stop_cfg = cfg.get("stop", {})
    stop = StopRule(
        max_frames=int(stop_cfg.get("max_frames", 1_000_000)),
        min_frame_errors=int(stop_cfg.get("min_frame_errors", 100)),
    )
    seed = int(cfg.get("seed", 0))
    power = cfg.get("power_convention", "second_moment")
    if power not in POWER_CONVENTIONS:
        raise ConfigError(f"power_convention must be one of {POWER_CONVENTIONS}")

    # identity of the whole run (code + encode + decode + stop + seed), so a
    # CSV can safely accumulate several experiments
    key = {
        "code_id": spec.content_hash(),
        "rule": rule_name(rule),
        "list_enc": rule.list_size if isinstance(rule, ListEncoding) else 1,
        "list_dec": decode_cfg.list_size,
        "stop": [stop.max_frames, stop.min_frame_errors],
        "seed": seed,
        "power": power,
    }
    config_hash = hashlib.sha256(json.dumps(key, sort_keys=True).encode()).hexdigest()[:12]

    out_csv = Path(out_csv)
    done: set[tuple[str, float]] = set()
    if out_csv.exists():
        for line in out_csv.read_text().splitlines()[1:]:
            parts = line.split(",")
            if len(parts) == len(CSV_COLUMNS):
                done.add((parts[0], float(parts[8])))
    else:
        out_csv.parent.mkdir(parents=True, exist_ok=True)
        out_csv.write_text(",".join(CSV_COLUMNS) + "\n")

    empirical = measure_empirical_p(spec, rule, int(cfg.get("p_measure_frames", 200)), seed)
    records = []
    for snr_db in cfg["sweep"]["snr_db"]:
        snr_db = float(snr_db)
        if (config_hash, snr_db) in done:
            continue
        rec = run_fer_point(
            spec, rule, decode_cfg, snr_db, stop, seed,
            power_convention=power, empirical=empirical,
        )
        records.append(rec)
        with out_csv.open("a") as fh:
            fh.write(rec.csv_row(spec.payload_size, config_hash) + "\n")
        if log_jsonl is not None:
            with Path(log_jsonl).open("a") as fh:
                entry = dict(rec.__dict__, config_hash=config_hash)
                fh.write(json.dumps(entry) + "\n")
    return records


def monotonicity_flags(records: list[SimRecord]) -> list[str]:
    """Flag FER inversions across an SNR sweep (higher SNR, higher FER).

    Single inversions on points with few errors are expected binomial noise,
    so they are reported, never fatal.
    """
    flags = []
    recs = sorted(records, key=lambda r: r.snr_db)
    for lo, hi in zip(recs, recs[1:]):
        if hi.fer > lo.fer:
            noise = " (low error count, likely noise)" if min(lo.frame_errors, hi.frame_errors) < 30 else ""
            flags.append(
                f"FER inversion: {lo.fer:.3e} @ {lo.snr_db} dB -> {hi.fer:.3e} @ {hi.snr_db} dB{noise}"
            )
    return flags


def snr_at_fer(
    spec: CodeSpec,
    rule: EncodeRule,
    decode_cfg: DecodeConfig,
    target_fer: float,
    snr_lo: float,
    snr_hi: float,
    stop: StopRule,
    seed: int,
    coarse_step: float = 0.5,
) -> tuple[float, list[SimRecord]]:
    """SNR (dB) at which the FER curve crosses `target_fer`.

    Scans from snr_lo in coarse steps until the target is bracketed, then
    interpolates log10(FER) linearly between the bracketing points. Points
    with zero errors are treated as below target.
    """
    empirical = measure_empirical_p(spec, rule, 200, seed)
    records: list[SimRecord] = []

    def point(snr_db: float) -> SimRecord:
        rec = run_fer_point(
            spec, rule, decode_cfg, snr_db, stop, seed, empirical=empirical
        )
        records.append(rec)
        return rec

    snr = snr_lo
    prev: SimRecord | None = None
    while snr <= snr_hi + 1e-9:
        rec = point(snr)
        if rec.fer <= target_fer:
            if prev is None:
                raise RuntimeError(
                    f"FER already below target at the scan start ({rec.fer:.3g} @ {snr} dB)"
                )
            hi_fer = max(rec.fer, 1e-12)
            x0, y0 = prev.snr_db, np.log10(prev.fer)
            x1, y1 = rec.snr_db, np.log10(hi_fer)
            t = (np.log10(target_fer) - y0) / (y1 - y0)
            return float(x0 + t * (x1 - x0)), records
        prev = rec
        snr = round(snr + coarse_step, 6)
    raise RuntimeError(f"FER stayed above {target_fer} up to {snr_hi} dB")
