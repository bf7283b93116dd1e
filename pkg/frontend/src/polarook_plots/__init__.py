"""Figures for shaped-OOK simulation outputs: rate curves, matcher rate
loss vs blocklength, and FER vs SNR, each with an exact-data JSON sidecar."""

from .render import KINDS, MissingColumnError, PlotSpec, render, sidecar_path

__version__ = "0.1.0"

__all__ = ["KINDS", "MissingColumnError", "PlotSpec", "render", "sidecar_path", "__version__"]
