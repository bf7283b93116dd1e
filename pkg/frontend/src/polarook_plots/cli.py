"""CLI: render figures from simulator CSVs.

    polarook-plot --kind fer --in results.csv --overlay baseline.csv --out fig.png

Exit codes: 0 ok (including empty inputs, which warn and draw empty axes),
2 bad arguments or malformed input.
"""

from __future__ import annotations

import argparse
import sys

from .render import KINDS, MissingColumnError, PlotSpec, render


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="polarook-plot", description=__doc__)
    ap.add_argument("--kind", required=True, choices=KINDS)
    ap.add_argument("--in", dest="inputs", required=True, nargs="+", help="input CSV file(s)")
    ap.add_argument("--overlay", nargs="*", default=[], help="external baseline CSV(s)")
    ap.add_argument("--label", nargs="*", default=None, help="series label per input file")
    ap.add_argument("--xlim", nargs=2, type=float, default=None)
    ap.add_argument("--ylim", nargs=2, type=float, default=None)
    ap.add_argument("--out", required=True, help="output image path (png/pdf/svg)")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        spec = PlotSpec(
            kind=args.kind,
            inputs=args.inputs,
            output=args.out,
            overlays=args.overlay,
            xlim=tuple(args.xlim) if args.xlim else None,
            ylim=tuple(args.ylim) if args.ylim else None,
            labels=args.label,
        )
        render(spec)
    except (MissingColumnError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(f"wrote {args.out} and {args.out}.data.json")
    return 0


if __name__ == "__main__":
    sys.exit(main())
