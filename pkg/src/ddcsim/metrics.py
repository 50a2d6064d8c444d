"""Per-iteration residuals and stationarity certificates."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dc import DcFunction, prox

CSV_COLUMNS = (
    "k",
    "eta_k",
    "consensus_rounds",
    "solution_residual",
    "stationarity_residual",
    "objective_residual",
    "consensus_residual",
    "xi_norm",
    "xi_hat_norm",
    "elapsed_ms",
)


@dataclass
class RunRecord:
    """One row of a run: iteration counter, tolerance, and residuals.

    solution_residual and objective_residual are None when no reference
    point / value is known; xi_hat_norm is None unless certification was
    requested; elapsed_ms is None unless timing was requested.
    """

    k: int
    eta_k: float
    consensus_rounds: int
    solution_residual: float | None
    stationarity_residual: float
    objective_residual: float | None
    consensus_residual: float
    xi_norm: float
    xi_hat_norm: float | None
    elapsed_ms: float | None = None

    def to_csv_row(self) -> list:
        vals = (
            self.k,
            self.eta_k,
            self.consensus_rounds,
            self.solution_residual,
            self.stationarity_residual,
            self.objective_residual,
            self.consensus_residual,
            self.xi_norm,
            self.xi_hat_norm,
            self.elapsed_ms,
        )
        return ["" if v is None else str(v) for v in vals]


def prox_pairs(problem, ys: np.ndarray, mu: float, budget=None):
    """Per-agent prox points (x_f, x_g) at the rows of ys."""
    ys = np.atleast_2d(np.asarray(ys, dtype=float))
    if len(problem) != ys.shape[0]:
        raise ValueError("one row of ys per agent expected")
    xf = np.empty_like(ys)
    xg = np.empty_like(ys)
    for i, dc_i in enumerate(problem):
        xf[i] = prox(dc_i.f, ys[i], mu, budget=budget)
        xg[i] = prox(dc_i.g, ys[i], mu, budget=budget)
    return xf, xg


def objective_value(problem, x: np.ndarray) -> float:
    """The unsmoothed objective (1/n) sum_i (f_i(x) - g_i(x))."""
    return float(np.mean([dc_i(x) for dc_i in problem]))


def stationarity_certificate(y: np.ndarray, problem, mu: float, pairs=None):
    """Certificate pair (xi, xi_hat).

    xi averages the per-agent smoothed gradients at each agent's own
    iterate; xi_hat evaluates the same average at the mean iterate, and
    equals the smoothed-objective gradient there. For efficiency the
    per-agent prox points may be passed in; they must come from the exact
    (tolerance-mode) oracles.
    """
    y = np.atleast_2d(np.asarray(y, dtype=float))
    if pairs is None:
        pairs = prox_pairs(problem, y, mu)
    xf, xg = pairs
    xi = (xg - xf).mean(axis=0) / mu
    y_hat = y.mean(axis=0)
    y_hat_rows = np.broadcast_to(y_hat, y.shape)
    xf_hat, xg_hat = prox_pairs(problem, y_hat_rows, mu)
    xi_hat = (xg_hat - xf_hat).mean(axis=0) / mu
    return xi, xi_hat


def residuals(
    y: np.ndarray,
    problem,
    mu: float,
    *,
    k: int,
    eta_k: float,
    consensus_rounds: int,
    x_star: np.ndarray | None = None,
    F_star: float | None = None,
    pairs=None,
    certify: bool = True,
    elapsed_ms: float | None = None,
) -> RunRecord:
    """Assemble one RunRecord from the per-agent iterates y (n rows).

    The stationarity residual averages ||x_g(y_i) - x_f(y_i)|| over agents;
    the objective residual evaluates the true (unsmoothed) objective at
    agent 0's iterate against F_star; the consensus residual is the average
    over agents of the summed distances to every other agent.
    """
    y = np.atleast_2d(np.asarray(y, dtype=float))
    n = y.shape[0]
    if pairs is None:
        pairs = prox_pairs(problem, y, mu)
    xf, xg = pairs

    stationarity = float(np.mean(np.linalg.norm(xg - xf, axis=1)))
    diffs = y[:, None, :] - y[None, :, :]
    consensus = float(np.linalg.norm(diffs, axis=2).sum() / n)
    solution = None
    if x_star is not None:
        solution = float(np.mean(np.linalg.norm(y - x_star, axis=1)))
    objective = None
    if F_star is not None:
        objective = objective_value(problem, y[0]) - float(F_star)

    xi = (xg - xf).mean(axis=0) / mu
    xi_norm = float(np.linalg.norm(xi))
    xi_hat_norm = None
    if certify:
        _, xi_hat = stationarity_certificate(y, problem, mu, pairs=pairs)
        xi_hat_norm = float(np.linalg.norm(xi_hat))

    return RunRecord(
        k=int(k),
        eta_k=float(eta_k),
        consensus_rounds=int(consensus_rounds),
        solution_residual=solution,
        stationarity_residual=stationarity,
        objective_residual=objective,
        consensus_residual=consensus,
        xi_norm=xi_norm,
        xi_hat_norm=xi_hat_norm,
        elapsed_ms=elapsed_ms,
    )
