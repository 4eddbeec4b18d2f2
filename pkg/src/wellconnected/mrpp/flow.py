"""Unlabeled multi-robot planning by max-flow on a time-expanded network.

Each vertex is split into an in/out pair of capacity 1 per timestep. A robot
either waits (out_t(v) -> in_{t+1}(v)) or crosses an edge through a shared
unit-capacity gadget that both endpoints feed into and both drain from, so
two robots can never exchange places over one edge in the same step.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import maximum_bipartite_matching, maximum_flow

from ..errors import InfeasibleError
from ..graph import Graph, distance_matrix
from .instance import Plan


@dataclass
class UnlabeledResult:
    plan: Plan
    ends: list[int]  # final vertex of the robot that started at sources[i]
    horizon: int


def matching_lower_bound(g: Graph, sources, targets) -> int:
    """Smallest T admitting a perfect source-target matching with d <= T."""
    d = distance_matrix(g, sources)[:, list(targets)]
    if (d < 0).any():
        raise InfeasibleError("some source cannot reach some target")
    levels = np.unique(d)
    lo, hi = 0, len(levels) - 1
    while lo < hi:
        mid = (lo + hi) // 2
        m = maximum_bipartite_matching(csr_matrix(d <= levels[mid]), perm_type="column")
        if (m >= 0).all():
            hi = mid
        else:
            lo = mid + 1
    return int(levels[lo])


def _network(g: Graph, sources, targets, T: int):
    n = g.n
    edges = np.array(g.edges(), np.int64).reshape(-1, 2)
    m = len(edges)
    L = 2 * n * (T + 1)
    src, sink = L + 2 * m * T, L + 2 * m * T + 1
    V = np.arange(n)

    def vin(t, v):
        return 2 * (t * n + v)

    tails = [vin(t, V) for t in range(T + 1)]
    heads = [vin(t, V) + 1 for t in range(T + 1)]
    u, v = edges[:, 0], edges[:, 1]
    k = np.arange(m)
    for t in range(T):
        tails.append(vin(t, V) + 1)
        heads.append(vin(t + 1, V))
        a = L + 2 * (t * m + k)
        b = a + 1
        tails += [vin(t, u) + 1, vin(t, v) + 1, a, b, b]
        heads += [a, a, b, vin(t + 1, u), vin(t + 1, v)]
    tails.append(np.full(len(sources), src))
    heads.append(vin(0, np.asarray(sources, np.int64)))
    tails.append(vin(T, np.asarray(targets, np.int64)) + 1)
    heads.append(np.full(len(targets), sink))
    rows = np.concatenate(tails)
    cols = np.concatenate(heads)
    size = sink + 1
    cap = csr_matrix((np.ones(len(rows), np.int32), (rows, cols)), shape=(size, size))
    return cap, src, sink, L


def _decompose(flow: csr_matrix, sources, n: int, T: int, L: int) -> list[list[int]]:
    flow = flow.tocsr()
    indptr, indices, data = flow.indptr, flow.indices, flow.data

    def succ(node: int) -> int:
        lo, hi = indptr[node], indptr[node + 1]
        pos = indices[lo:hi][data[lo:hi] > 0]
        return int(pos[0])

    paths = []
    for s in sources:
        path = [int(s)]
        node = 2 * s
        for t in range(T):
            nxt = succ(node + 1)
            if nxt >= L:
                nxt = succ(succ(nxt))
            path.append((nxt // 2) - (t + 1) * n)
            node = nxt
        paths.append(path)
    return paths


def unlabeled_plan(g: Graph, sources, targets, max_horizon: int | None = None) -> UnlabeledResult:
    """Move robots on ``sources`` onto the vertex set ``targets``, collision-free.

    The horizon grows one step at a time from the bottleneck-matching bound
    until the flow saturates; ``n + |V| - 1`` steps always suffice on a
    connected graph.
    """
    sources = [int(s) for s in sources]
    targets = [int(t) for t in targets]
    if len(sources) != len(targets):
        raise ValueError("sources and targets differ in size")
    if len(set(sources)) != len(sources) or len(set(targets)) != len(targets):
        raise ValueError("sources and targets must be pairwise distinct")
    k = len(sources)
    if k == 0 or set(sources) == set(targets):
        return UnlabeledResult(Plan([[s] for s in sources]), list(sources), 0)
    limit = k + g.n - 1 if max_horizon is None else max_horizon
    T = matching_lower_bound(g, sources, targets)
    while T <= limit:
        cap, src, sink, L = _network(g, sources, targets, T)
        res = maximum_flow(cap, src, sink, method="dinic")
        if res.flow_value == k:
            paths = _decompose(res.flow, sources, g.n, T, L)
            return UnlabeledResult(Plan(paths), [p[-1] for p in paths], T)
        T += 1
    raise InfeasibleError(f"no unlabeled plan within {limit} steps")
