"""Command line front end: generate instances, run experiments, sweep."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .harness import (
    DEFAULT_VARIANTS,
    ExperimentConfig,
    build_graph,
    generate_instance,
    run_experiment,
    sweep,
    write_instance,
)


def _add_instance_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--n-agents", type=int, default=10, help="number of agents")
    p.add_argument("--m-rows", type=int, default=72, help="rows per agent")
    p.add_argument("--p-dim", type=int, default=256, help="decision dimension")
    p.add_argument("--sparsity", type=int, default=None,
                   help="nonzeros in the planted point (default ceil(0.05 p))")
    p.add_argument("--rho", type=float, default=0.1, help="regularization weight")
    p.add_argument("--noise-scale", type=float, default=0.01)
    p.add_argument("--connect-prob", type=float, default=0.2,
                   help="edge probability of the random digraph")
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--out", required=True, help="output directory")


def _add_solver_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--alpha", type=float, default=0.01, help="outer step size")
    p.add_argument("--theta", type=float, default=0.1,
                   help="tolerance decay exponent offset; eta_k = 1/k^(1+theta)")
    p.add_argument("--eta0", type=float, default=1.0)
    p.add_argument("--outer-iters", type=int, default=300)
    p.add_argument("--variants", default=",".join(DEFAULT_VARIANTS),
                   help="comma list, e.g. consensus,inexact-10,inexact-100,mixing")
    p.add_argument("--stop-stationarity", type=float, default=None,
                   help="optional early-stop threshold on the stationarity residual")
    p.add_argument("--certify", dest="certify", action="store_true", default=True,
                   help="record the averaged-iterate certificate (default)")
    p.add_argument("--no-certify", dest="certify", action="store_false")
    p.add_argument("--timing", action="store_true",
                   help="populate the per-iteration elapsed_ms column "
                        "(off by default so reruns are byte-identical)")


def _config(args: argparse.Namespace, **overrides) -> ExperimentConfig:
    base = dict(
        n_agents=args.n_agents,
        m=args.m_rows,
        p=args.p_dim,
        s=args.sparsity,
        rho=args.rho,
        noise_scale=args.noise_scale,
        connect_prob=args.connect_prob,
        seed=args.seed,
    )
    base.update(overrides)
    return ExperimentConfig(**base)


def _cmd_generate(args) -> int:
    cfg = _config(args)
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    instance = generate_instance(cfg)
    graph = build_graph(cfg)
    sha = write_instance(outdir / "instance.bin", instance)
    (outdir / "graph.json").write_text(graph.to_json() + "\n")
    summary = {
        "config": cfg.__dict__ | {"variants": list(cfg.variants)},
        "rng": "philox4x64",
        "mu": instance.mu,
        "F_star": instance.F_star,
        "sparsity": instance.sparsity,
        "instance_path": "instance.bin",
        "instance_sha256": sha,
        "graph_path": "graph.json",
    }
    (outdir / "instance.json").write_text(json.dumps(summary, indent=2) + "\n")
    print("wrote %s (sha256 %s)" % (outdir / "instance.bin", sha))
    return 0


def _cmd_run(args) -> int:
    cfg = _config(
        args,
        alpha=args.alpha,
        theta=args.theta,
        eta0=args.eta0,
        outer_iters=args.outer_iters,
        variants=tuple(v for v in args.variants.split(",") if v),
        certify=args.certify,
        timing=args.timing,
        stop_stationarity=args.stop_stationarity,
    )
    manifest = run_experiment(cfg, args.out)
    print("wrote %s" % (Path(args.out) / "manifest.json"))
    for entry in manifest["variants"]:
        print(
            "  %-12s %-16s rounds=%-8d wall=%.0fms"
            % (entry["name"], entry["csv_path"], entry["total_rounds"], entry["wall_ms"])
        )
    return 0


def _cmd_sweep(args) -> int:
    cfg = _config(
        args,
        alpha=args.alpha,
        theta=args.theta,
        eta0=args.eta0,
        outer_iters=args.outer_iters,
        variants=tuple(v for v in args.variants.split(",") if v),
        certify=args.certify,
        timing=args.timing,
        stop_stationarity=args.stop_stationarity,
    )
    values = [_parse_value(v) for v in args.values.split(",") if v]
    sweep(cfg, args.param, values, args.out)
    print("wrote %s" % (Path(args.out) / "sweep.json"))
    return 0


def _parse_value(text: str):
    for cast in (int, float):
        try:
            return cast(text)
        except ValueError:
            continue
    return text


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ddcsim",
        description="distributed difference-of-convex optimization experiments",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="draw and store an instance and graph")
    _add_instance_flags(gen)

    runp = sub.add_parser("run", help="run the experiment and write CSVs + manifest")
    _add_instance_flags(runp)
    _add_solver_flags(runp)

    sw = sub.add_parser("sweep", help="run the experiment over a list of values")
    _add_instance_flags(sw)
    _add_solver_flags(sw)
    sw.add_argument("--param", required=True, help="config field to vary")
    sw.add_argument("--values", required=True, help="comma list of values")

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handlers = {"generate": _cmd_generate, "run": _cmd_run, "sweep": _cmd_sweep}
    try:
        return handlers[args.command](args)
    except Exception as exc:  # CLI contract: nonzero exit, message on stderr
        print("error: %s" % (exc,), file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
