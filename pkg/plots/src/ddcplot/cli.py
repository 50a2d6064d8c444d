"""Command line front end: render one figure or the standard six."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .render import PlotSpec, plot_all, render


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ddcplot",
        description="comparison figures from experiment CSV logs",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    one = sub.add_parser("plot", help="render a single metric figure")
    one.add_argument("--manifest", required=True, help="path to manifest.json")
    one.add_argument("--metric", required=True, help="CSV column to plot")
    one.add_argument("--variants", default=None,
                     help="comma list; default: every variant in the manifest")
    one.add_argument("--linear", action="store_true",
                     help="linear y axis (default is log scale)")
    one.add_argument("--out", required=True, help="output image path (.png)")

    allp = sub.add_parser("plot-all", help="render the six standard figures")
    allp.add_argument("--manifest", required=True, help="path to manifest.json")
    allp.add_argument("--out-dir", default=None,
                      help="output directory (default: next to the manifest)")

    return parser


def _cmd_plot(args) -> int:
    variants = None
    if args.variants is not None:
        variants = tuple(v for v in args.variants.split(",") if v)
    spec = PlotSpec(
        manifest=Path(args.manifest),
        metric=args.metric,
        out=Path(args.out),
        variants=variants,
        log_scale=not args.linear,
    )
    print("wrote %s" % (render(spec),))
    return 0


def _cmd_plot_all(args) -> int:
    for path in plot_all(args.manifest, args.out_dir):
        print("wrote %s" % (path,))
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handlers = {"plot": _cmd_plot, "plot-all": _cmd_plot_all}
    try:
        return handlers[args.command](args)
    except Exception as exc:  # CLI contract: nonzero exit, message on stderr
        print("error: %s" % (exc,), file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
