"""Prioritized planning with space-time A* over a reservation table."""

from __future__ import annotations

import heapq
from collections.abc import Sequence
from dataclasses import dataclass, field

import numpy as np

from .. import _kernels
from ..graph import Graph
from .instance import MrppInstance, Plan


@dataclass
class Reservations:
    """Space-time claims made by robots planned so far.

    ``occupied`` holds (vertex, t) pairs, ``traversed`` holds (u, v, t) for a
    move u -> v between t and t + 1, and ``permanent`` maps a parked goal to
    the first timestep it is held forever.
    """

    occupied: set[tuple[int, int]] = field(default_factory=set)
    traversed: set[tuple[int, int, int]] = field(default_factory=set)
    permanent: dict[int, int] = field(default_factory=dict)
    last_use: dict[int, int] = field(default_factory=dict)
    horizon_used: int = 0

    def blocked(self, v: int, t: int) -> bool:
        p = self.permanent.get(v)
        return (p is not None and t >= p) or (v, t) in self.occupied

    def add_path(self, path: Sequence[int], park: bool = True):
        for t, v in enumerate(path):
            self.occupied.add((v, t))
            if self.last_use.get(v, -1) < t:
                self.last_use[v] = t
            if t + 1 < len(path) and path[t + 1] != v:
                self.traversed.add((v, path[t + 1], t))
        self.horizon_used = max(self.horizon_used, len(path) - 1)
        if park:
            self.permanent[path[-1]] = len(path) - 1


def spacetime_astar(g: Graph, start: int, goal: int, res: Reservations, horizon: int,
                    avoid: frozenset[int] = frozenset(), start_time: int = 0) -> list[int] | None:
    """Earliest-arrival path that can then park at ``goal`` forever.

    States are (vertex, t) with waiting allowed; ``avoid`` vertices are never
    entered. The path is indexed from ``start_time``. Returns None on FAIL.
    """
    if goal in res.permanent or goal in avoid:
        return None
    if res.blocked(start, start_time):
        return None
    enter = np.ones(g.n, np.bool_)
    enter[list(avoid)] = False
    enter[goal] = True
    h = _kernels.bfs(g.indptr, g.indices, enter, enter, goal)
    if h[start] < 0:
        return None
    settle = res.last_use.get(goal, -1)
    # past the last reservation nothing changes, so later times share one state
    frozen = max(res.horizon_used, start_time) + 1
    occupied, traversed, permanent = res.occupied, res.traversed, res.permanent
    parent: dict[tuple[int, int], tuple[int, int] | None] = {(start, start_time): None}
    frontier = [(int(h[start]) + start_time, -start_time, start)]
    while frontier:
        _, neg_t, v = heapq.heappop(frontier)
        t = -neg_t
        if v == goal and t > settle:
            out = []
            state = (v, min(t, frozen))
            while state is not None:
                out.append(state[0])
                state = parent[state]
            out.reverse()
            return out + [goal] * (t - start_time + 1 - len(out))
        if t >= horizon:
            continue
        t1 = t + 1
        key_t = min(t1, frozen)
        for w in (v,) + g.adjacency[v]:
            if h[w] < 0 or (w, key_t) in parent:
                continue
            p = permanent.get(w)
            if (p is not None and t1 >= p) or (w, t1) in occupied:
                continue
            if w != v and (w, v, t) in traversed:
                continue
            parent[(w, key_t)] = (v, min(t, frozen))
            heapq.heappush(frontier, (t1 + int(h[w]), -t1, w))
    return None


def default_horizon(g: Graph, n: int, res: Reservations) -> int:
    """n D(G) + D(G), stretched past the last reservation so waits stay possible."""
    D = g.diameter
    return max(n * D + D, res.horizon_used + g.n)


def prioritized_plan(g: Graph, starts: Sequence[int], goals: Sequence[int], order: Sequence[int],
                     horizon: int | None = None, avoid_starts: bool = True,
                     res: Reservations | None = None) -> Plan | None:
    """Plan robots one at a time in ``order``, each parking at its goal.

    With ``avoid_starts`` a robot also keeps off the starts of robots not yet
    planned, which makes the scheme complete on well-formed instances.
    """
    n = len(starts)
    if sorted(order) != list(range(n)):
        raise ValueError("order must be a permutation of the robots")
    res = Reservations() if res is None else res
    paths: list[list[int] | None] = [None] * n
    pending = set(range(n))
    for i in order:
        pending.discard(i)
        avoid = frozenset(starts[j] for j in pending) if avoid_starts else frozenset()
        limit = horizon if horizon is not None else default_horizon(g, n, res)
        path = spacetime_astar(g, starts[i], goals[i], res, limit, avoid)
        if path is None:
            return None
        res.add_path(path)
        paths[i] = path
    return Plan(paths)


def hca_star(g: Graph, instance: MrppInstance, order: Sequence[int] | None = None,
             rng: np.random.Generator | None = None, horizon: int | None = None) -> Plan | None:
    """Prioritized planning straight from S to G; a random order unless given."""
    if order is None:
        rng = np.random.default_rng() if rng is None else rng
        order = rng.permutation(instance.n).tolist()
    return prioritized_plan(g, instance.starts, instance.goals, order, horizon, avoid_starts=False)
