"""Outer loop: local smoothed-gradient steps glued by consensus rounds.

Each agent holds one DC term pair and a copy of the decision vector. An
outer iteration takes one gradient step on the smoothed local objective,
z_i = y_i - (alpha / mu) (x_g(y_i) - x_f(y_i)), then replaces the z's
by consensus estimates of their average. The step carries no network-size
factor: averaging the z's must reproduce a full gradient step on the mean
of the smoothed objectives, which is what drives the outer descent. The consensus stage is either run
to a per-iteration tolerance eta_k = 1/k^(1+theta) with the finite-time
protocol ("consensus" and "inexact" variants) or collapsed to a single
mixing round ("mixing"). The inexact variant additionally caps the inner
prox solves at a fixed iteration budget.
"""

from __future__ import annotations

import time
import warnings
from dataclasses import dataclass, field

import numpy as np

from .consensus import mixing_round, run_eta_consensus
from .dc import lipschitz_constants, prox
from .graph import Digraph, WeightMatrix, diameter
from .metrics import prox_pairs, residuals

VARIANTS = ("consensus", "inexact", "mixing")


@dataclass
class SolverConfig:
    alpha: float
    mu: float
    theta: float = 0.1
    eta0: float = 1.0
    outer_iters: int = 300
    variant: str = "consensus"
    inner_budget: int | None = None
    stop_stationarity: float | None = None
    max_consensus_rounds: int = 10**6
    radius_rule: str = "enclosing"
    certify: bool = True
    timing: bool = False

    def __post_init__(self):
        if self.alpha <= 0.0:
            raise ValueError("alpha must be positive")
        if self.mu <= 0.0:
            raise ValueError("mu must be positive")
        if self.theta <= 0.0:
            raise ValueError("theta must be positive for a summable tolerance series")
        if self.eta0 <= 0.0:
            raise ValueError("eta0 must be positive")
        if self.outer_iters < 0:
            raise ValueError("outer_iters must be nonnegative")
        if self.variant not in VARIANTS:
            raise ValueError("variant must be one of %s" % (VARIANTS,))
        if self.variant == "inexact":
            if self.inner_budget is None or self.inner_budget < 1:
                raise ValueError("inexact variant needs inner_budget >= 1")

    def eta(self, k: int) -> float:
        """Consensus tolerance schedule; eta0 labels the initial state."""
        if k <= 0:
            return self.eta0
        return 1.0 / float(k) ** (1.0 + self.theta)


def parse_variant(name: str):
    """Map names like "consensus", "mixing", "inexact-10" to (variant, budget)."""
    name = name.strip().lower()
    if name in ("consensus", "mixing"):
        return name, None
    if name.startswith("inexact-"):
        budget = int(name.split("-", 1)[1])
        return "inexact", budget
    raise ValueError("unknown variant %r" % (name,))


@dataclass
class SolverState:
    y: np.ndarray  # (n, p) post-consensus iterates
    z: np.ndarray  # (n, p) pre-consensus gradient steps
    k: int = 0
    consensus_rounds_total: int = 0


@dataclass
class RunResult:
    records: list
    y_final: np.ndarray
    alpha_used: float
    L_F: float
    D: int
    consensus_rounds_total: int
    y_history: list = field(default_factory=list)
    z_history: list = field(default_factory=list)


def effective_alpha(cfg: SolverConfig, m_f: float) -> float:
    """Configured alpha clipped to the stability range 1/L_F, with a warning."""
    L_F = lipschitz_constants(m_f, cfg.mu).L_F
    if cfg.alpha > 1.0 / L_F:
        warnings.warn(
            "alpha=%g exceeds 1/L_F=%g; clipping" % (cfg.alpha, 1.0 / L_F),
            stacklevel=2,
        )
        return 1.0 / L_F
    return cfg.alpha


def gradient_step(
    dc_i, y_i: np.ndarray, cfg: SolverConfig, n: int, alpha: float | None = None
) -> np.ndarray:
    """One agent's smoothed-gradient step on its local objective.

    alpha defaults to the configured step clipped against this agent's own
    modulus; run() passes the problem-wide clipped value instead. n is the
    agent count; it does not scale the step (the mean of the local updates
    must equal a full gradient step on the mean smoothed objective, so the
    1/n lives in the consensus averaging, not here).
    """
    budget = cfg.inner_budget if cfg.variant == "inexact" else None
    xf = prox(dc_i.f, y_i, cfg.mu, budget=budget)
    xg = prox(dc_i.g, y_i, cfg.mu, budget=budget)
    if alpha is None:
        alpha = effective_alpha(cfg, max(dc_i.f.modulus, 0.0))
    return y_i - (alpha / cfg.mu) * (xg - xf)


def _steps(problem, y, cfg, alpha):
    budget = cfg.inner_budget if cfg.variant == "inexact" else None
    xf, xg = prox_pairs(problem, y, cfg.mu, budget=budget)
    z = y - (alpha / cfg.mu) * (xg - xf)
    return z, (xf, xg)


def _communicate(z, weights, cfg, D, eta_next):
    if cfg.variant == "mixing":
        return mixing_round(z, weights), 1
    res = run_eta_consensus(
        z,
        weights,
        D,
        eta_next,
        max_rounds=cfg.max_consensus_rounds,
        rule=cfg.radius_rule,
    )
    return res.w_final, res.rounds_used


def outer_iteration(
    state: SolverState,
    problem,
    graph: Digraph,
    weights: WeightMatrix,
    cfg: SolverConfig,
) -> SolverState:
    """One gradient-plus-communication cycle, for driving the loop by hand."""
    m_f = max(dc_i.f.modulus for dc_i in problem)
    alpha = effective_alpha(cfg, m_f)
    D = diameter(graph) if graph.n > 1 else 1
    z, _ = _steps(problem, state.y, cfg, alpha)
    y, rounds = _communicate(z, weights, cfg, D, cfg.eta(state.k + 1))
    return SolverState(
        y=y,
        z=z,
        k=state.k + 1,
        consensus_rounds_total=state.consensus_rounds_total + rounds,
    )


def run(
    problem,
    graph: Digraph,
    weights: WeightMatrix,
    cfg: SolverConfig,
    init: np.ndarray,
    x_star: np.ndarray | None = None,
    F_star: float | None = None,
    trace: bool = False,
) -> RunResult:
    """Run the outer loop for cfg.outer_iters iterations.

    init must be an (n, p) array of per-agent starting points; see
    gaussian_init / zeros for the stock choices. Records are emitted for
    the initial state (k = 0) and after every outer iteration. Metrics
    always use tolerance-mode prox points, so under the inexact variant the
    recorded residuals measure the true maps at the biased iterates rather
    than the budgeted approximations; for the exact variants the step's
    prox points are reused. Deterministic: a fixed config and init yield an
    identical record sequence.
    """
    init = np.atleast_2d(np.asarray(init, dtype=float))
    n = graph.n
    if init.shape[0] != n or len(problem) != n:
        raise ValueError("init and problem must both have one row/entry per agent")
    m_f = max(dc_i.f.modulus for dc_i in problem)
    params = lipschitz_constants(m_f, cfg.mu)
    alpha = effective_alpha(cfg, m_f)
    D = diameter(graph) if n > 1 else 1

    state = SolverState(y=init.copy(), z=init.copy())
    exact_pairs = prox_pairs(problem, state.y, cfg.mu)
    records = [
        residuals(
            state.y,
            problem,
            cfg.mu,
            k=0,
            eta_k=cfg.eta(0),
            consensus_rounds=0,
            x_star=x_star,
            F_star=F_star,
            pairs=exact_pairs,
            certify=cfg.certify,
            elapsed_ms=0.0 if cfg.timing else None,
        )
    ]
    result = RunResult(
        records=records,
        y_final=state.y,
        alpha_used=alpha,
        L_F=params.L_F,
        D=D,
        consensus_rounds_total=0,
    )
    if trace:
        result.y_history.append(state.y.copy())
        result.z_history.append(state.z.copy())

    for k in range(cfg.outer_iters):
        t0 = time.perf_counter() if cfg.timing else None
        if cfg.variant == "inexact":
            z, _ = _steps(problem, state.y, cfg, alpha)
        else:
            xf, xg = exact_pairs
            z = state.y - (alpha / cfg.mu) * (xg - xf)
        eta_next = cfg.eta(k + 1)
        y, rounds = _communicate(z, weights, cfg, D, eta_next)
        state = SolverState(
            y=y,
            z=z,
            k=k + 1,
            consensus_rounds_total=state.consensus_rounds_total + rounds,
        )
        exact_pairs = prox_pairs(problem, y, cfg.mu)
        elapsed = None
        if cfg.timing:
            elapsed = (time.perf_counter() - t0) * 1e3
        records.append(
            residuals(
                y,
                problem,
                cfg.mu,
                k=k + 1,
                eta_k=eta_next,
                consensus_rounds=rounds,
                x_star=x_star,
                F_star=F_star,
                pairs=exact_pairs,
                certify=cfg.certify,
                elapsed_ms=elapsed,
            )
        )
        if trace:
            result.y_history.append(y.copy())
            result.z_history.append(z.copy())
        if (
            cfg.stop_stationarity is not None
            and records[-1].stationarity_residual < cfg.stop_stationarity
        ):
            break

    result.y_final = state.y
    result.consensus_rounds_total = state.consensus_rounds_total
    return result


def zeros_init(n: int, p: int) -> np.ndarray:
    return np.zeros((n, p))


def gaussian_init(n: int, p: int, seed: int, scale: float = 1.0) -> np.ndarray:
    rng = np.random.Generator(np.random.Philox(seed))
    return scale * rng.standard_normal((n, p))
