"""Directed communication graphs and column-stochastic mixing weights."""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass
from functools import cached_property

import numpy as np


class NotStronglyConnected(Exception):
    """The operation needs a strongly connected digraph."""


class RetriesExhausted(Exception):
    """Random generation could not produce a strongly connected digraph."""


@dataclass(frozen=True)
class Digraph:
    """Immutable directed graph on nodes 0..n-1.

    An edge (i, j) means information flows from node j to node i, i.e. j is
    an in-neighbor of i. Self-loops are never stored; self-weights are the
    business of the mixing matrix.
    """

    n: int
    edges: frozenset

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("need at least one node")
        edges = frozenset((int(i), int(j)) for i, j in self.edges)
        object.__setattr__(self, "edges", edges)
        for i, j in edges:
            if i == j:
                raise ValueError("self-loop (%d,%d) not allowed" % (i, j))
            if not (0 <= i < self.n and 0 <= j < self.n):
                raise ValueError("edge (%d,%d) out of range for n=%d" % (i, j, self.n))

    @cached_property
    def in_lists(self) -> list:
        """in_lists[i] holds the sorted in-neighbors of node i."""
        nbrs = [[] for _ in range(self.n)]
        for i, j in sorted(self.edges):
            nbrs[i].append(j)
        return nbrs

    @cached_property
    def out_lists(self) -> list:
        """out_lists[j] holds the sorted nodes that receive from node j."""
        nbrs = [[] for _ in range(self.n)]
        for i, j in sorted(self.edges, key=lambda e: (e[1], e[0])):
            nbrs[j].append(i)
        return nbrs

    def in_neighbors(self, i: int) -> list:
        return list(self.in_lists[i])

    def out_degree(self, j: int) -> int:
        return len(self.out_lists[j])

    def to_json(self) -> str:
        return json.dumps({"n": self.n, "edges": sorted(self.edges)})

    @classmethod
    def from_json(cls, text: str) -> "Digraph":
        doc = json.loads(text)
        return cls(int(doc["n"]), frozenset(tuple(e) for e in doc["edges"]))


def _reachable(n: int, adj: list, start: int) -> int:
    seen = [False] * n
    seen[start] = True
    queue = deque([start])
    count = 1
    while queue:
        v = queue.popleft()
        for w in adj[v]:
            if not seen[w]:
                seen[w] = True
                count += 1
                queue.append(w)
    return count


def strongly_connected(g: Digraph) -> bool:
    """True iff every node reaches every other along directed edges.

    Two sweeps from node 0: one along the flow direction, one against it.
    """
    if g.n == 1:
        return True
    return (_reachable(g.n, g.out_lists, 0) == g.n
            and _reachable(g.n, g.in_lists, 0) == g.n)


def diameter(g: Digraph) -> int:
    """Longest shortest directed path over all ordered node pairs.

    Raises NotStronglyConnected when some pair has no directed path, and
    ValueError for n < 2 where no ordered pairs exist.
    """
    if g.n < 2:
        raise ValueError("diameter needs at least two nodes")
    if not strongly_connected(g):
        raise NotStronglyConnected("diameter undefined: graph is not strongly connected")
    best = 0
    for s in range(g.n):
        dist = [-1] * g.n
        dist[s] = 0
        queue = deque([s])
        while queue:
            v = queue.popleft()
            for w in g.out_lists[v]:
                if dist[w] < 0:
                    dist[w] = dist[v] + 1
                    queue.append(w)
        best = max(best, max(dist))
    return best


def erdos_renyi(n: int, prob: float, seed: int, max_retries: int = 1000) -> Digraph:
    """Sample a strongly connected digraph, each ordered pair kept with prob.

    One n-by-n uniform block is drawn per attempt; edge (i, j), i != j, is
    present iff the (i, j) entry falls below prob. Disconnected draws are
    retried with seed+1, seed+2, ... up to max_retries attempts, after which
    RetriesExhausted is raised. Deterministic for a given seed.
    """
    if n < 2:
        raise ValueError("erdos_renyi needs n >= 2")
    if not 0.0 <= prob <= 1.0:
        raise ValueError("prob must be in [0, 1]")
    for attempt in range(max_retries):
        rng = np.random.Generator(np.random.Philox(seed + attempt))
        block = rng.random((n, n))
        edges = frozenset(
            (i, j) for i in range(n) for j in range(n) if i != j and block[i, j] < prob
        )
        g = Digraph(n, edges)
        if strongly_connected(g):
            return g
    raise RetriesExhausted(
        "no strongly connected draw in %d attempts (n=%d, prob=%g, seed=%d)"
        % (max_retries, n, prob, seed)
    )


@dataclass(frozen=True)
class WeightMatrix:
    """Column-stochastic nonnegative mixing matrix with positive diagonal."""

    p: np.ndarray

    def __post_init__(self):
        p = np.array(self.p, dtype=float)
        if p.ndim != 2 or p.shape[0] != p.shape[1]:
            raise ValueError("weight matrix must be square")
        if np.any(p < 0.0):
            raise ValueError("weights must be nonnegative")
        if np.any(np.diag(p) <= 0.0):
            raise ValueError("diagonal weights must be positive")
        colsums = p.sum(axis=0)
        if np.max(np.abs(colsums - 1.0)) > 1e-12:
            raise ValueError("columns must sum to one within 1e-12")
        p.setflags(write=False)
        object.__setattr__(self, "p", p)

    @property
    def n(self) -> int:
        return self.p.shape[0]

    def supported_on(self, g: Digraph) -> bool:
        """True iff off-diagonal positives sit exactly on g's edges."""
        if self.n != g.n:
            return False
        for i in range(self.n):
            for j in range(self.n):
                if i != j and (self.p[i, j] > 0.0) != ((i, j) in g.edges):
                    return False
        return True


def column_stochastic_weights(g: Digraph) -> WeightMatrix:
    """Equal-split weights: node j sends 1/(1+outdeg(j)) to itself and each
    of its out-neighbors."""
    if not strongly_connected(g):
        raise NotStronglyConnected("weights need a strongly connected digraph")
    p = np.zeros((g.n, g.n))
    for j in range(g.n):
        share = 1.0 / (1.0 + g.out_degree(j))
        p[j, j] = share
        for i in g.out_lists[j]:
            p[i, j] = share
    return WeightMatrix(p)
