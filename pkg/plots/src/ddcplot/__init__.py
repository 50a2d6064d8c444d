"""Comparison figures from ddcsim experiment CSV logs."""

from .render import (
    INEXACT_METRICS,
    MIXING_METRICS,
    MissingColumn,
    MissingFile,
    PlotSpec,
    build_figure,
    load_manifest,
    load_series,
    plot_all,
    render,
)

__all__ = [
    "INEXACT_METRICS",
    "MIXING_METRICS",
    "MissingColumn",
    "MissingFile",
    "PlotSpec",
    "build_figure",
    "load_manifest",
    "load_series",
    "plot_all",
    "render",
]
