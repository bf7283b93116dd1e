"""Command-line front end.

Subcommands: construct (build a code file), rates (achievable-rate curves),
rateloss (matcher rate loss vs blocklength), fer (Monte Carlo FER sweep from
a JSON config), info (describe a code file). Exit codes: 0 ok, 2 bad
config/arguments, 3 runtime failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import kernels
from .channel import db_to_linear, mutual_information, optimize_p, snr_for_rate
from .codespec import CodeSpec
from .construction import StatsCache, construct_code, default_trials
from .crc import default_crc
from .harness import ConfigError, load_config, monotonicity_flags, run_sweep
from .rateloss import rate_loss_sweep, sweep_to_csv

EXIT_OK, EXIT_CONFIG, EXIT_RUNTIME = 0, 2, 3


def _add_cache_arg(p: argparse.ArgumentParser) -> None:
    p.add_argument("--cache-dir", default=None, help="directory for Monte Carlo statistics cache")


def _cache(args) -> StatsCache | None:
    return StatsCache(args.cache_dir) if args.cache_dir else None


def cmd_construct(args) -> int:
    if args.p is None and args.design_snr_db is None:
        print("construct: provide --p or --design-snr-db", file=sys.stderr)
        return EXIT_CONFIG
    if args.p is not None:
        p = args.p
    else:
        p = optimize_p(db_to_linear(args.design_snr_db))[0]
        print(f"optimized input distribution p = {p:.6f}")
    design = args.design_snr_db if args.design_snr_db is not None else 0.0
    trials = args.trials if args.trials else default_trials(args.N)
    spec = construct_code(
        args.N, args.R, p, args.D, design,
        crc=default_crc(args.crc_width), trials=trials, seed=args.seed,
        cache=_cache(args),
    )
    spec.save(args.out)
    print(spec.describe())
    print(f"wrote {args.out}")
    return EXIT_OK


def cmd_rates(args) -> int:
    snrs = np.arange(args.snr_min, args.snr_max + 1e-9, args.snr_step)
    lines = ["snr_db,mi_uniform,mi_optimized,p_star"]
    for snr in snrs:
        gamma = db_to_linear(float(snr))
        p_star, mi_opt = optimize_p(gamma)
        lines.append(f"{float(snr)!r},{mutual_information(0.5, gamma)!r},{mi_opt!r},{p_star!r}")
    Path(args.out).write_text("\n".join(lines) + "\n")
    print(f"wrote {args.out}")
    if args.gap_at_rate is not None:
        uniform = snr_for_rate(args.gap_at_rate, shaped=False)
        shaped = snr_for_rate(args.gap_at_rate, shaped=True)
        print(
            f"rate {args.gap_at_rate}: uniform needs {uniform:.3f} dB, "
            f"optimized {shaped:.3f} dB, gap {uniform - shaped:.3f} dB"
        )
    return EXIT_OK


def cmd_rateloss(args) -> int:
    points = rate_loss_sweep(
        args.lengths,
        target_dm_rate=args.rate,
        list_size=args.list_size,
        frames=args.frames,
        trials=args.trials,
        seed=args.seed,
        cache=_cache(args),
    )
    Path(args.out).write_text(sweep_to_csv(points))
    print(f"wrote {args.out} ({len(points)} points)")
    return EXIT_OK


def cmd_fer(args) -> int:
    cfg = load_config(args.config)
    spec = None
    if args.code:
        spec = CodeSpec.load(args.code)
    records = run_sweep(cfg, args.out, cache=_cache(args), spec=spec, log_jsonl=args.log)
    for rec in records:
        print(
            f"snr {rec.snr_db:+.2f} dB  a={rec.amplitude:.4f}  "
            f"frames {rec.frames}  errors {rec.frame_errors}  fer {rec.fer:.3e}"
        )
    for flag in monotonicity_flags(records):
        print(f"note: {flag}")
    print(f"appended {len(records)} rows to {args.out}")
    return EXIT_OK


def cmd_info(args) -> int:
    spec = CodeSpec.load(args.code)
    spec.validate()
    print(spec.describe())
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="polarook", description=__doc__)
    ap.add_argument("--backend-info", action="store_true", help="print kernel backend and exit")
    sub = ap.add_subparsers(dest="command")

    p = sub.add_parser("construct", help="build a shaped polar code file")
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--R", type=float, required=True)
    p.add_argument("--p", type=float, default=None, help="target ones probability")
    p.add_argument("--design-snr-db", type=float, default=None)
    p.add_argument("--D", type=int, required=True, help="shaping set size")
    p.add_argument("--crc-width", type=int, default=0, choices=(0, 8, 16, 32))
    p.add_argument("--trials", type=int, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    _add_cache_arg(p)
    p.set_defaults(func=cmd_construct)

    p = sub.add_parser("rates", help="achievable-rate curves for uniform and optimized inputs")
    p.add_argument("--snr-min", type=float, default=-10.0)
    p.add_argument("--snr-max", type=float, default=10.0)
    p.add_argument("--snr-step", type=float, default=0.25)
    p.add_argument("--gap-at-rate", type=float, default=None, help="also report the SNR gap at this rate")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_rates)

    p = sub.add_parser("rateloss", help="matcher rate loss vs blocklength")
    p.add_argument("--lengths", type=int, nargs="+", default=[64, 256, 1024, 4096])
    p.add_argument("--rate", type=float, default=0.5, help="target matching rate, bits/output symbol")
    p.add_argument("--list-size", type=int, default=32)
    p.add_argument("--frames", type=int, default=200)
    p.add_argument("--trials", type=int, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    _add_cache_arg(p)
    p.set_defaults(func=cmd_rateloss)

    p = sub.add_parser("fer", help="run a FER sweep from a JSON config")
    p.add_argument("--config", required=True)
    p.add_argument("--code", default=None, help="use a previously constructed code file")
    p.add_argument("--out", required=True, help="CSV output (appended, resumable)")
    p.add_argument("--log", default=None, help="optional JSONL log incl. wall times")
    _add_cache_arg(p)
    p.set_defaults(func=cmd_fer)

    p = sub.add_parser("info", help="describe a code file")
    p.add_argument("code")
    p.set_defaults(func=cmd_info)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    if args.backend_info:
        print(f"kernel backend: {kernels.BACKEND}")
        return EXIT_OK
    if not getattr(args, "func", None):
        ap.print_help()
        return EXIT_CONFIG
    try:
        return args.func(args)
    except (ConfigError, ValueError, FileNotFoundError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        print(f"runtime error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
