"""Experiment generation, execution, and on-disk artifacts.

The stock experiment is sparse regression with an L1-minus-L2 penalty,
split row-wise across agents on a random digraph: agent i holds
f_i(x) = 0.5 ||A_i x - b_i||^2 + rho ||x||_1 and g_i = rho ||x||_2.

Instance files are binary: the header is the magic bytes "DDCI" and five
little-endian uint32 fields (version, n, m, p, s), followed by
little-endian float64 payloads in this order: F_star (one value), x_star
(p values), then per agent A_i (m*p values, row-major) and b_i (m values).

Randomness uses the counter-based Philox generator keyed by the config
seed. Draw order is normative so instances are reproducible from the
manifest alone: per-agent A entries drawn column-major and then column
normalized, the support of x_star as the first s entries of a random
permutation of range(p), the s support values, and finally the per-agent
noise vectors.
"""

from __future__ import annotations

import csv
import hashlib
import json
import struct
import time
import warnings
from dataclasses import asdict, dataclass, fields, replace
from pathlib import Path

import numpy as np

from .dc import DcFunction, L2Norm, LeastSquaresL1, lipschitz_constants
from .graph import Digraph, column_stochastic_weights, erdos_renyi
from .metrics import CSV_COLUMNS
from .solver import SolverConfig, parse_variant, run, zeros_init

_MAGIC = b"DDCI"
_VERSION = 1

DEFAULT_VARIANTS = ("consensus", "inexact-10", "inexact-100", "mixing")


@dataclass(frozen=True)
class ExperimentConfig:
    """Desk-scale defaults; raise m and p for the full-size setup."""

    n_agents: int = 10
    m: int = 72
    p: int = 256
    s: int | None = None  # sparsity; None means ceil(0.05 p)
    rho: float = 0.1
    noise_scale: float = 0.01
    connect_prob: float = 0.2
    alpha: float = 0.01
    theta: float = 0.1
    eta0: float = 1.0
    outer_iters: int = 300
    seed: int = 42
    variants: tuple = DEFAULT_VARIANTS
    certify: bool = True
    timing: bool = False
    stop_stationarity: float | None = None
    max_graph_retries: int = 1000

    def __post_init__(self):
        if self.n_agents < 1 or self.m < 1 or self.p < 1:
            raise ValueError("n_agents, m, p must be positive")
        s = self.sparsity
        if not 1 <= s <= self.p:
            raise ValueError("sparsity must be in [1, p]")
        object.__setattr__(self, "variants", tuple(self.variants))
        for name in self.variants:
            parse_variant(name)

    @property
    def sparsity(self) -> int:
        if self.s is not None:
            return int(self.s)
        return int(np.ceil(0.05 * self.p))


@dataclass
class Instance:
    """Per-agent data plus the planted point and its objective value."""

    A: np.ndarray  # (n, m, p)
    b: np.ndarray  # (n, m)
    x_star: np.ndarray  # (p,)
    F_star: float
    mu: float
    sparsity: int

    @property
    def n_agents(self) -> int:
        return self.A.shape[0]


def generate_instance(cfg: ExperimentConfig) -> Instance:
    """Draw the data in the documented normative order."""
    n, m, p, s = cfg.n_agents, cfg.m, cfg.p, cfg.sparsity
    if n * m * p > 5 * 10**7:
        warnings.warn("full-size configuration; expect a long generation and run")
    rng = np.random.Generator(np.random.Philox(cfg.seed))
    A = np.empty((n, m, p))
    for i in range(n):
        raw = rng.standard_normal((p, m)).T  # column-major draw order
        A[i] = raw / np.linalg.norm(raw, axis=0, keepdims=True)
    support = rng.permutation(p)[:s]
    values = rng.standard_normal(s)
    x_star = np.zeros(p)
    x_star[support] = values
    b = np.empty((n, m))
    for i in range(n):
        b[i] = A[i] @ x_star + cfg.noise_scale * rng.standard_normal(m)

    lam_max = max(float(np.linalg.eigvalsh(A[i].T @ A[i])[-1]) for i in range(n))
    mu = 1.0 / lam_max
    fit = sum(0.5 * float(np.sum((A[i] @ x_star - b[i]) ** 2)) for i in range(n)) / n
    F_star = (
        fit
        + cfg.rho * float(np.sum(np.abs(x_star)))
        - cfg.rho * float(np.linalg.norm(x_star))
    )
    return Instance(A=A, b=b, x_star=x_star, F_star=F_star, mu=mu, sparsity=s)


def dc_problem(instance: Instance, rho: float) -> list:
    """One DC pair per agent from the instance data."""
    return [
        DcFunction(
            f=LeastSquaresL1(instance.A[i], instance.b[i], rho),
            g=L2Norm(rho),
        )
        for i in range(instance.n_agents)
    ]


def instance_to_bytes(instance: Instance) -> bytes:
    n, m, p = instance.A.shape
    head = _MAGIC + struct.pack("<5I", _VERSION, n, m, p, instance.sparsity)
    chunks = [head, struct.pack("<d", instance.F_star)]
    chunks.append(instance.x_star.astype("<f8").tobytes())
    for i in range(n):
        chunks.append(np.ascontiguousarray(instance.A[i], dtype="<f8").tobytes())
        chunks.append(instance.b[i].astype("<f8").tobytes())
    return b"".join(chunks)


def instance_from_bytes(data: bytes, mu: float | None = None) -> Instance:
    if data[:4] != _MAGIC:
        raise ValueError("not an instance file (bad magic)")
    version, n, m, p, s = struct.unpack_from("<5I", data, 4)
    if version != _VERSION:
        raise ValueError("unsupported instance version %d" % version)
    off = 4 + 20
    (F_star,) = struct.unpack_from("<d", data, off)
    off += 8
    x_star = np.frombuffer(data, dtype="<f8", count=p, offset=off).copy()
    off += 8 * p
    A = np.empty((n, m, p))
    b = np.empty((n, m))
    for i in range(n):
        A[i] = (
            np.frombuffer(data, dtype="<f8", count=m * p, offset=off)
            .reshape(m, p)
            .copy()
        )
        off += 8 * m * p
        b[i] = np.frombuffer(data, dtype="<f8", count=m, offset=off).copy()
        off += 8 * m
    if mu is None:
        lam_max = max(float(np.linalg.eigvalsh(A[i].T @ A[i])[-1]) for i in range(n))
        mu = 1.0 / lam_max
    return Instance(A=A, b=b, x_star=x_star, F_star=float(F_star), mu=float(mu), sparsity=int(s))


def write_instance(path, instance: Instance) -> str:
    data = instance_to_bytes(instance)
    with open(path, "wb") as fh:
        fh.write(data)
    return hashlib.sha256(data).hexdigest()


def read_instance(path, mu: float | None = None) -> Instance:
    with open(path, "rb") as fh:
        return instance_from_bytes(fh.read(), mu=mu)


def build_graph(cfg: ExperimentConfig) -> Digraph:
    return erdos_renyi(
        cfg.n_agents, cfg.connect_prob, cfg.seed, max_retries=cfg.max_graph_retries
    )


def _solver_config(cfg: ExperimentConfig, instance: Instance, variant_name: str) -> SolverConfig:
    variant, budget = parse_variant(variant_name)
    return SolverConfig(
        alpha=cfg.alpha,
        mu=instance.mu,
        theta=cfg.theta,
        eta0=cfg.eta0,
        outer_iters=cfg.outer_iters,
        variant=variant,
        inner_budget=budget,
        stop_stationarity=cfg.stop_stationarity,
        certify=cfg.certify,
        timing=cfg.timing,
    )


def write_records_csv(path, records) -> None:
    with open(path, "w", newline="\n") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_COLUMNS)
        for rec in records:
            writer.writerow(rec.to_csv_row())


def run_experiment(cfg: ExperimentConfig, outdir) -> dict:
    """Generate, solve every requested variant, and write all artifacts.

    Writes instance.bin, graph.json, one <variant>.csv per variant, and
    manifest.json (last, so its presence marks a complete run). Returns the
    manifest dict.
    """
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    instance = generate_instance(cfg)
    graph = build_graph(cfg)
    weights = column_stochastic_weights(graph)
    problem = dc_problem(instance, cfg.rho)
    sha = write_instance(outdir / "instance.bin", instance)
    (outdir / "graph.json").write_text(graph.to_json() + "\n")

    init = zeros_init(cfg.n_agents, cfg.p)
    manifest_variants = []
    alpha_used = None
    for name in cfg.variants:
        scfg = _solver_config(cfg, instance, name)
        t0 = time.perf_counter()
        result = run(
            problem,
            graph,
            weights,
            scfg,
            init,
            x_star=instance.x_star,
            F_star=instance.F_star,
        )
        wall_ms = (time.perf_counter() - t0) * 1e3
        alpha_used = result.alpha_used
        csv_name = "%s.csv" % name
        write_records_csv(outdir / csv_name, result.records)
        manifest_variants.append(
            {
                "name": name,
                "csv_path": csv_name,
                "total_rounds": result.consensus_rounds_total,
                "wall_ms": wall_ms,
            }
        )

    m_f = max(dc_i.f.modulus for dc_i in problem)
    manifest = {
        "config": asdict(cfg),
        "rng": "philox4x64",
        "mu": instance.mu,
        "L_muF": lipschitz_constants(m_f, instance.mu).L_F,
        "alpha_used": alpha_used,
        "sparsity": instance.sparsity,
        "F_star": instance.F_star,
        "instance_path": "instance.bin",
        "instance_sha256": sha,
        "graph_path": "graph.json",
        "variants": manifest_variants,
    }
    (outdir / "manifest.json").write_text(json.dumps(manifest, indent=2) + "\n")
    return manifest


def sweep(cfg: ExperimentConfig, param: str, values, outdir) -> list:
    """Rerun the experiment while varying one config field over values."""
    if param not in {f.name for f in fields(ExperimentConfig)}:
        raise ValueError("unknown config field %r" % (param,))
    outdir = Path(outdir)
    manifests = []
    for value in values:
        sub = outdir / ("%s-%s" % (param, value))
        manifests.append(run_experiment(replace(cfg, **{param: value}), sub))
    index = [
        {"param": param, "value": v, "dir": "%s-%s" % (param, v)} for v in values
    ]
    outdir.mkdir(parents=True, exist_ok=True)
    (outdir / "sweep.json").write_text(json.dumps(index, indent=2) + "\n")
    return manifests
