"""Build comparison figures from experiment CSV logs and their manifest.

This package consumes only the on-disk interface of the simulator: the
manifest JSON (which names one CSV per solver variant) and the CSV files
themselves. It never imports the simulator.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path

from matplotlib.figure import Figure

# metric families rendered by plot_all: budget comparison first, then the
# single-round mixing comparison
INEXACT_METRICS = ("stationarity_residual", "objective_residual", "solution_residual")
MIXING_METRICS = ("stationarity_residual", "objective_residual", "consensus_residual")

X_COLUMN = "k"
FIGSIZE = (6.4, 4.0)
DPI = 100
# fixed PNG text chunk so reruns are byte-identical regardless of the
# matplotlib version string
METADATA = {"Software": "ddcplot"}


class MissingFile(FileNotFoundError):
    """A manifest or CSV path does not exist."""


class MissingColumn(Exception):
    """The requested metric is not a column of the CSV logs."""


@dataclass(frozen=True)
class PlotSpec:
    """One figure: a metric drawn for a subset of a manifest's variants."""

    manifest: Path
    metric: str
    out: Path
    variants: tuple | None = None  # None selects every variant in the manifest
    log_scale: bool = True


def load_manifest(path) -> dict:
    path = Path(path)
    if not path.is_file():
        raise MissingFile("manifest not found: %s" % (path,))
    return json.loads(path.read_text())


def load_series(path) -> dict:
    """Read one CSV into {column: list of float-or-None}, '' mapping to None."""
    path = Path(path)
    if not path.is_file():
        raise MissingFile("CSV not found: %s" % (path,))
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            raise MissingColumn("CSV has no header row: %s" % (path,))
        columns = {name: [] for name in reader.fieldnames}
        for row in reader:
            for name in columns:
                cell = row[name]
                columns[name].append(float(cell) if cell else None)
    return columns


def _variant_csvs(manifest: dict, manifest_path, variants) -> list:
    """Resolve (name, csv_path) pairs, validating the requested subset."""
    base = Path(manifest_path).parent
    available = {v["name"]: base / v["csv_path"] for v in manifest["variants"]}
    if variants is None:
        names = list(available)
    else:
        unknown = [v for v in variants if v not in available]
        if unknown:
            raise ValueError(
                "unknown variants %s; manifest has %s"
                % (", ".join(unknown), ", ".join(available))
            )
        names = list(variants)
    return [(name, available[name]) for name in names]


def build_figure(spec: PlotSpec) -> Figure:
    """Assemble the figure without touching the filesystem for output."""
    manifest = load_manifest(spec.manifest)
    fig = Figure(figsize=FIGSIZE, dpi=DPI)
    ax = fig.add_subplot()
    for name, csv_path in _variant_csvs(manifest, spec.manifest, spec.variants):
        series = load_series(csv_path)
        for column in (X_COLUMN, spec.metric):
            if column not in series:
                raise MissingColumn(
                    "column %r not in %s (columns: %s)"
                    % (column, csv_path, ", ".join(series))
                )
        points = [
            (k, v)
            for k, v in zip(series[X_COLUMN], series[spec.metric])
            if k is not None and v is not None
        ]
        ax.plot(
            [k for k, _ in points],
            [v for _, v in points],
            linewidth=1.5,
            label=name,
        )
    if spec.log_scale:
        ax.set_yscale("log")
    ax.set_xlabel("outer iteration k")
    ax.set_ylabel(spec.metric.replace("_", " "))
    ax.legend()
    fig.tight_layout()
    return fig


def render(spec: PlotSpec) -> Path:
    """Write the figure to spec.out and return that path."""
    fig = build_figure(spec)
    out = Path(spec.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(out, format="png", dpi=DPI, metadata=METADATA)
    return out


def plot_all(manifest_path, outdir=None) -> list:
    """Emit the six standard comparison figures next to the manifest
    (or into outdir): the budgeted-solver family against the
    tolerance-mode run, and the single-round mixing family against it."""
    manifest_path = Path(manifest_path)
    manifest = load_manifest(manifest_path)
    outdir = manifest_path.parent if outdir is None else Path(outdir)
    available = [v["name"] for v in manifest["variants"]]
    families = (
        (
            "inexact",
            INEXACT_METRICS,
            [v for v in available if v == "consensus" or v.startswith("inexact")],
        ),
        (
            "mixing",
            MIXING_METRICS,
            [v for v in available if v in ("consensus", "mixing")],
        ),
    )
    written = []
    for family, metrics, variants in families:
        if not variants:
            raise ValueError(
                "manifest has no variants for the %r comparison" % (family,)
            )
        for metric in metrics:
            short = metric.removesuffix("_residual")
            spec = PlotSpec(
                manifest=manifest_path,
                metric=metric,
                out=outdir / ("%s-%s.png" % (family, short)),
                variants=tuple(variants),
            )
            written.append(render(spec))
    return written
