"""Figure rendering from simulator CSV files.

Consumes only the CSV column contracts of the simulation CLI; every figure
also writes a JSON sidecar holding the exact plotted arrays so correctness
is testable without image diffing. Overlay CSVs (external baselines) need
only snr_db and fer columns plus an optional label.
"""

from __future__ import annotations

import csv
import json
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

KINDS = ("rates", "rateloss", "fer")

_STYLE = {
    "figure.figsize": (6.4, 4.4),
    "axes.grid": True,
    "grid.alpha": 0.35,
    "font.size": 10,
}


@dataclass
class PlotSpec:
    kind: str
    inputs: list
    output: str
    overlays: list = field(default_factory=list)
    xlim: tuple | None = None
    ylim: tuple | None = None
    labels: list | None = None  # per input file; defaults derived from data

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"figure kind must be one of {KINDS}, got {self.kind!r}")
        if not self.inputs:
            raise ValueError("at least one input CSV is required")


class MissingColumnError(ValueError):
    def __init__(self, path, column):
        super().__init__(f"{path}: required column '{column}' is missing")
        self.column = column


def _read_csv(path) -> list[dict]:
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def _need(rows, path, *columns):
    if not rows:
        return
    for col in columns:
        if col not in rows[0]:
            raise MissingColumnError(path, col)


def _series_rates(path) -> list[dict]:
    rows = _read_csv(path)
    _need(rows, path, "snr_db", "mi_uniform", "mi_optimized")
    if not rows:
        return []
    x = [float(r["snr_db"]) for r in rows]
    return [
        {"label": "uniform input", "x": x, "y": [float(r["mi_uniform"]) for r in rows]},
        {"label": "optimized input", "x": x, "y": [float(r["mi_optimized"]) for r in rows]},
    ]


def _series_rateloss(path) -> list[dict]:
    rows = _read_csv(path)
    _need(rows, path, "N", "matcher", "rate_loss")
    groups: dict[str, list] = {}
    for r in rows:
        groups.setdefault(r["matcher"], []).append((int(r["N"]), float(r["rate_loss"])))
    out = []
    for matcher in sorted(groups):
        pts = sorted(groups[matcher])
        out.append({"label": matcher, "x": [p[0] for p in pts], "y": [p[1] for p in pts]})
    return out


def _series_fer(path, label=None) -> list[dict]:
    rows = _read_csv(path)
    _need(rows, path, "snr_db", "fer")
    full = rows and "config_hash" in rows[0] and "rule" in rows[0]
    groups: dict[str, list] = {}
    for r in rows:
        if full:
            key = f"{r['rule']} listdec={r['list_dec']} crc={r['crc']} [{r['config_hash'][:6]}]"
        else:
            key = label or Path(path).stem
        groups.setdefault(key, []).append((float(r["snr_db"]), float(r["fer"])))
    out = []
    for key in sorted(groups):
        pts = sorted(groups[key])
        series_label = label if (label and len(groups) == 1) else key
        out.append({"label": series_label, "x": [p[0] for p in pts], "y": [p[1] for p in pts]})
    return out


def collect_series(spec: PlotSpec) -> list[dict]:
    series: list[dict] = []
    for idx, path in enumerate(spec.inputs):
        label = spec.labels[idx] if spec.labels and idx < len(spec.labels) else None
        if spec.kind == "rates":
            got = _series_rates(path)
        elif spec.kind == "rateloss":
            got = _series_rateloss(path)
        else:
            got = _series_fer(path, label)
        if not got:
            warnings.warn(f"{path}: no data rows, skipping", stacklevel=2)
        series.extend(got)
    for path in spec.overlays:
        got = _series_fer(path, None) if spec.kind == "fer" else _series_rateloss(path)
        if not got:
            warnings.warn(f"{path}: empty overlay, skipping", stacklevel=2)
        for s in got:
            s["overlay"] = True
        series.extend(got)
    return series


def render(spec: PlotSpec) -> str:
    """Draw the figure and its data sidecar; returns the image path."""
    series = collect_series(spec)
    with plt.rc_context(_STYLE):
        fig, ax = plt.subplots()
        for s in series:
            style = {"linestyle": "--", "marker": "s", "markersize": 3} if s.get("overlay") else {"marker": "o", "markersize": 3}
            ax.plot(s["x"], s["y"], label=s["label"], **style)
        if spec.kind == "rates":
            ax.set_xlabel("SNR (dB)")
            ax.set_ylabel("achievable rate (bits/channel use)")
        elif spec.kind == "rateloss":
            ax.set_xlabel("output blocklength (bits)")
            ax.set_ylabel("rate loss (bits/output symbol)")
            ax.set_xscale("log", base=2)
        else:
            ax.set_xlabel("SNR (dB)")
            ax.set_ylabel("frame error rate")
            ax.set_yscale("log")
        if spec.xlim:
            ax.set_xlim(*spec.xlim)
        if spec.ylim:
            ax.set_ylim(*spec.ylim)
        if series:
            ax.legend(fontsize=8)
        fig.tight_layout()
        fig.savefig(spec.output, dpi=150)
        plt.close(fig)
    sidecar = {
        "kind": spec.kind,
        "series": [{"label": s["label"], "x": s["x"], "y": s["y"]} for s in series],
    }
    Path(sidecar_path(spec.output)).write_text(json.dumps(sidecar, indent=1))
    return spec.output


def sidecar_path(output) -> str:
    return str(output) + ".data.json"
