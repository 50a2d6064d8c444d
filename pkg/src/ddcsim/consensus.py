"""Push-sum averaging with finite-time, radius-certified termination.

Each node mixes a vector numerator u and a scalar denominator v through the
same column-stochastic weights; the ratio w = u / v tracks the average of
the initial vectors. On top of the asymptotic protocol, every node carries
a radius r that is reset every D rounds (D at least the graph diameter) and
grown by a max-plus recursion in between; at the end of a window the radius
certifies a ball around the node's current estimate that contains every
node's estimate from the start of the window, and therefore also the true
average. Once all radii fall below a tolerance eta, every estimate is
provably within eta of the average and the protocol stops.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from .graph import WeightMatrix

RADIUS_RULES = ("enclosing", "printed")


class DimensionMismatch(Exception):
    """State and weight shapes disagree."""


class MaxRoundsExceeded(Exception):
    """The round cap was hit before the radii fell below eta."""


@dataclass
class ConsensusState:
    """Per-node protocol state at round k."""

    u: np.ndarray  # (n, p) numerators
    v: np.ndarray  # (n,) denominators, positive
    w: np.ndarray  # (n, p) ratio estimates u / v
    r: np.ndarray  # (n,) stored radii
    k: int = 0


@dataclass
class ConsensusResult:
    w_final: np.ndarray
    rounds_used: int
    radius_trace: list = field(default_factory=list)
    # pre-reset radius value at the end of each window, one entry per m = 1, 2, ...
    window_radii: list = field(default_factory=list)


def initial_state(init: np.ndarray) -> ConsensusState:
    init = np.atleast_2d(np.asarray(init, dtype=float))
    n = init.shape[0]
    return ConsensusState(
        u=init.copy(),
        v=np.ones(n),
        w=init.copy(),
        r=np.zeros(n),
        k=0,
    )


def consensus_round(state: ConsensusState, weights: WeightMatrix) -> ConsensusState:
    """One synchronous mixing round. Radii are carried over untouched."""
    p = weights.p
    if state.u.shape[0] != p.shape[0]:
        raise DimensionMismatch(
            "state has %d rows, weights are %dx%d"
            % (state.u.shape[0], p.shape[0], p.shape[1])
        )
    u = p @ state.u
    v = p @ state.v
    return ConsensusState(u=u, v=v, w=u / v[:, None], r=state.r.copy(), k=state.k + 1)


def _edge_pattern(weights: WeightMatrix):
    """Off-diagonal support of the weights: (receiver, sender) index arrays."""
    mask = weights.p > 0.0
    np.fill_diagonal(mask, False)  # mask is a fresh boolean array, not the weights
    dst, src = np.nonzero(mask)
    return dst, src


def radius_recursion(
    state: ConsensusState,
    prev: ConsensusState,
    weights: WeightMatrix,
    rule: str = "enclosing",
) -> np.ndarray:
    """One growth step of the radius recursion, without the mod-D reset.

    rule "enclosing": r_i = max over j in N_i^- and j = i of
    ||w_i(k) - w_j(k-1)|| + r_j(k-1). Including the node's own previous
    state is what makes the end-of-window ball provably contain every
    node's start-of-window estimate whenever D >= diameter.

    rule "printed": r_i = ||w_i(k) - w_i(k-1)|| + max over j in N_i^- of
    r_j(k-1), a self-difference variant kept for comparison; it does not
    certify enclosure.
    """
    if rule not in RADIUS_RULES:
        raise ValueError("unknown radius rule %r" % (rule,))
    dst, src = _edge_pattern(weights)
    self_diff = np.linalg.norm(state.w - prev.w, axis=1)
    if rule == "enclosing":
        r = self_diff + prev.r
        vals = np.linalg.norm(state.w[dst] - prev.w[src], axis=1) + prev.r[src]
        np.maximum.at(r, dst, vals)
    else:
        nbr_max = np.zeros_like(prev.r)
        np.maximum.at(nbr_max, dst, prev.r[src])
        r = self_diff + nbr_max
    return r


def radius_update(
    state: ConsensusState,
    prev: ConsensusState,
    D: int,
    weights: WeightMatrix,
    rule: str = "enclosing",
) -> np.ndarray:
    """Stored radius sequence: zero at every multiple of D, grown otherwise."""
    if D < 1:
        raise ValueError("D must be >= 1")
    if state.k % D == 0:
        return np.zeros(state.u.shape[0])
    return radius_recursion(state, prev, weights, rule=rule)


def run_eta_consensus(
    init: np.ndarray,
    weights: WeightMatrix,
    D: int,
    eta: float,
    max_rounds: int = 10**6,
    rule: str = "enclosing",
    trace_path=None,
) -> ConsensusResult:
    """Run rounds until every node's end-of-window radius falls below eta.

    Termination is checked every D rounds against the pre-reset radius
    value; the printed reset-to-zero branch applies to the stored sequence
    only, otherwise the comparison would be vacuous. On success the states
    from the detection round are returned; the enclosure certificate bounds
    their distance to the average of init by the radii, hence by eta.

    Raises MaxRoundsExceeded when the cap is hit first.
    """
    if eta <= 0.0:
        raise ValueError("eta must be positive")
    if D < 1:
        raise ValueError("D must be >= 1")
    state = initial_state(init)
    target = state.u.mean(axis=0)
    trace_rows = [] if trace_path is not None else None
    result = ConsensusResult(w_final=state.w, rounds_used=0)
    result.radius_trace.append(state.r.copy())
    if trace_rows is not None:
        _append_trace(trace_rows, state, target)
    try:
        for _ in range(max_rounds):
            prev = state
            state = consensus_round(state, weights)
            grown = radius_recursion(state, prev, weights, rule=rule)
            if state.k % D == 0:
                result.window_radii.append(grown)
                state.r = np.zeros_like(grown)
                done = bool(np.max(grown) < eta)
            else:
                state.r = grown
                done = False
            result.radius_trace.append(state.r.copy())
            if trace_rows is not None:
                _append_trace(trace_rows, state, target)
            if done:
                result.w_final = state.w.copy()
                result.rounds_used = state.k
                return result
        raise MaxRoundsExceeded(
            "no eta=%g agreement within %d rounds" % (eta, max_rounds)
        )
    finally:
        if trace_rows is not None:
            _write_trace(trace_path, trace_rows)


def mixing_round(z: np.ndarray, weights: WeightMatrix) -> np.ndarray:
    """A single mixing application with a fresh denominator of ones."""
    z = np.atleast_2d(np.asarray(z, dtype=float))
    if z.shape[0] != weights.n:
        raise DimensionMismatch(
            "z has %d rows, weights are %dx%d" % (z.shape[0], weights.n, weights.n)
        )
    u = weights.p @ z
    v = weights.p @ np.ones(weights.n)
    return u / v[:, None]


def _append_trace(rows: list, state: ConsensusState, target: np.ndarray) -> None:
    dev = np.linalg.norm(state.w - target, axis=1)
    for i in range(state.u.shape[0]):
        rows.append((state.k, i, state.r[i], dev[i]))


def _write_trace(path, rows) -> None:
    with open(path, "w", newline="\n") as fh:
        writer = csv.writer(fh)
        writer.writerow(["round", "agent", "radius", "deviation_from_mean"])
        writer.writerows(rows)
