"""Well-connected sets: verification, candidate filtering, maximal construction, metrics."""

from __future__ import annotations

import enum
import json
import math
from collections.abc import Iterable
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .errors import GraphTooLargeError, WcsError
from .graph import UNREACHABLE, Graph, GridMap, is_connected, members_mask


class Classification(enum.Enum):
    WCS = "WCS"
    SWCS_ONLY = "SWCS_ONLY"
    NOT_SWCS = "NOT_SWCS"
    UNKNOWN = "UNKNOWN"


@dataclass(frozen=True)
class VertexSet:
    members: frozenset[int]
    classification: Classification = Classification.UNKNOWN

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self):
        return iter(sorted(self.members))

    def __contains__(self, v) -> bool:
        return v in self.members

    @classmethod
    def verified(cls, g: Graph, members: Iterable[int]) -> VertexSet:
        members = frozenset(members)
        return cls(members, verify_wcs(g, members))

    def to_json(self, graph_id: str = "", per_avg: float | None = None) -> dict:
        return {
            "graph_id": graph_id,
            "members": sorted(self.members),
            "classification": self.classification.value,
            "per_avg": per_avg,
        }


class StrategyKind(enum.Enum):
    RANDOM = "random"
    GREEDY = "greedy"


@dataclass(frozen=True)
class MwcsStrategy:
    kind: StrategyKind = StrategyKind.GREEDY
    seed: int = 0
    restarts: int = 1

    def __post_init__(self):
        if self.restarts < 1:
            raise ValueError("restarts must be >= 1")
        if isinstance(self.kind, str):
            object.__setattr__(self, "kind", StrategyKind(self.kind.lower()))


def verify_wcs(g: Graph, members: Iterable[int]) -> Classification:
    """Classify a vertex set against both well-connectedness properties."""
    in_set = members_mask(g, members)
    free = ~in_set
    everything = np.ones(g.n, np.bool_)
    pairwise = True
    for u in np.flatnonzero(in_set):
        # reach other members either directly or through non-members only
        d = _kernels.bfs(g.indptr, g.indices, everything, free, int(u))
        if (d[in_set] < 0).any():
            pairwise = False
            break
    if not pairwise:
        return Classification.NOT_SWCS
    if is_connected(g, free):
        return Classification.WCS
    return Classification.SWCS_ONLY


def orphan_neighbors(g: Graph, members: Iterable[int]) -> frozenset[int]:
    """Non-members that are the single remaining free neighbour of some member."""
    in_set = members_mask(g, members)
    out = set()
    for v in np.flatnonzero(in_set):
        free = [w for w in g.adjacency[v] if not in_set[w]]
        if len(free) == 1:
            out.add(free[0])
    return frozenset(out)


def candidate_set(g: Graph, members: Iterable[int]) -> frozenset[int]:
    """Non-members that survive the articulation-point and orphan filters.

    Every returned vertex extends the set to a WCS. Empty when a member has
    no free neighbour left, since then nothing outside can reach it.
    """
    in_set = members_mask(g, members)
    cand, ok = _kernels.candidates(g.indptr, g.indices, in_set)
    if not ok:
        raise WcsError("complement of the set is disconnected")
    return frozenset(np.flatnonzero(cand).tolist())


def additional_check(g: Graph, members: frozenset[int], forbidden=frozenset()) -> frozenset[int]:
    """Swap in a larger closed neighbourhood N(v) + {v} if one is a WCS."""
    best = members
    for v in range(g.n):
        if g.degree(v) + 1 <= len(best):
            continue
        closed = frozenset(g.adjacency[v]) | {v}
        if closed & forbidden:
            continue
        if verify_wcs(g, closed) is Classification.WCS:
            best = closed
    return best


class _Distances:
    """Full-graph BFS rows, cached for graphs small enough to hold them."""

    def __init__(self, g: Graph, cache_limit: int = 4000):
        self.g = g
        self.cache = {} if g.n <= cache_limit else None
        self._everything = np.ones(g.n, np.bool_)

    def row(self, v: int) -> np.ndarray:
        if self.cache is not None and v in self.cache:
            return self.cache[v]
        d = _kernels.bfs(self.g.indptr, self.g.indices, self._everything, self._everything, v)
        if self.cache is not None:
            self.cache[v] = d
        return d


def _construct(g: Graph, kind: StrategyKind, rng: np.random.Generator | None, dist: _Distances,
               totals: np.ndarray | None) -> frozenset[int]:
    """One run of the maximal construction loop; ``rng=None`` means deterministic."""
    in_set = np.zeros(g.n, np.bool_)
    score = np.zeros(g.n, np.int64)
    first = True
    while True:
        cand, _ = _kernels.candidates(g.indptr, g.indices, in_set)
        pool = np.flatnonzero(cand)
        if len(pool) == 0:
            break
        if kind is StrategyKind.RANDOM:
            u = int(rng.choice(pool))
        elif first:
            # 1-median among the initial candidates
            u = int(pool[np.argmin(totals[pool])]) if rng is None else int(rng.choice(pool))
        else:
            s = score[pool]
            ties = pool[s == s.min()]
            u = int(ties[0]) if rng is None else int(rng.choice(ties))
        first = False
        in_set[u] = True
        if kind is StrategyKind.GREEDY:
            score += dist.row(u)
    return frozenset(np.flatnonzero(in_set).tolist())


def maximal_wcs(g: Graph, strategy: MwcsStrategy = MwcsStrategy()) -> VertexSet:
    """Grow a WCS until the candidate filter is empty, best over restarts.

    GREEDY adds the candidate with the smallest summed distance to the
    current members; its first restart starts from the graph median with
    lowest-id ties, later restarts randomise the first pick and ties.
    Restart results are compared by size, then by average PER.
    """
    if g.n == 0:
        return VertexSet(frozenset(), Classification.WCS)
    dist = _Distances(g)
    totals = None
    if strategy.kind is StrategyKind.GREEDY:
        totals = _kernels.distance_sums(g.indptr, g.indices)
    seeds = np.random.SeedSequence(strategy.seed).spawn(strategy.restarts)
    results = []
    for r, ss in enumerate(seeds):
        if strategy.kind is StrategyKind.GREEDY and r == 0:
            rng = None
        else:
            rng = np.random.default_rng(ss)
        results.append(additional_check(g, _construct(g, strategy.kind, rng, dist, totals)))
    return VertexSet(_best_of(g, results), Classification.WCS)


def _best_of(g: Graph, sets: list[frozenset[int]]) -> frozenset[int]:
    top = max(len(s) for s in sets)
    tied = list(dict.fromkeys(s for s in sets if len(s) == top))
    if len(tied) == 1:
        return tied[0]
    return max(tied, key=lambda s: per_avg(g, s))


def wcp_distance(g: Graph, members: Iterable[int], u: int, v: int) -> int:
    """Shortest u-v path whose interior avoids the set; ``UNREACHABLE`` if none."""
    if u == v:
        raise ValueError("endpoints must differ")
    in_set = members_mask(g, members)
    everything = np.ones(g.n, np.bool_)
    return int(_kernels.bfs(g.indptr, g.indices, everything, ~in_set, u)[v])


def per(g: Graph, members: Iterable[int], ref: int) -> float:
    """Path efficiency ratio seen from ``ref``: sum of d over sum of d_w."""
    in_set = members_mask(g, members)
    everything = np.ones(g.n, np.bool_)
    d = _kernels.bfs(g.indptr, g.indices, everything, everything, ref)
    dw = _kernels.bfs(g.indptr, g.indices, everything, ~in_set, ref)
    if (dw[in_set] == UNREACHABLE).any():
        raise WcsError(f"some member has no well-connected path from {ref}")
    den = int(dw[in_set].sum())
    return 1.0 if den == 0 else int(d[in_set].sum()) / den


def per_avg(g: Graph, members: Iterable[int]) -> float:
    """PER averaged over every vertex of the graph as reference.

    Non-member references with no well-connected path to some member count
    as 0. That only happens when a member has no free neighbour.
    """
    if g.n == 0:
        return 1.0
    value = _kernels.per_average(g.indptr, g.indices, members_mask(g, members))
    if value < 0:
        raise WcsError("set is not pairwise reachable by well-connected paths")
    return float(value)


def upper_bound(g: Graph) -> int:
    """Largest possible WCS size from the maximum degree."""
    delta = g.max_degree
    if delta == 0:
        return g.n
    return int(math.floor(max((delta - 1) / delta * g.n, delta + 1)))


def longest_induced_path(g: Graph, max_vertices: int = 14) -> int:
    """Vertex count of a longest induced path, by exhaustive extension."""
    if g.n > max_vertices:
        raise GraphTooLargeError(f"{g.n} vertices exceeds the exhaustive limit {max_vertices}")
    nb = g.neighbor_masks
    best = min(g.n, 1)

    def extend(last: int, used: int, blocked: int, length: int):
        nonlocal best
        best = max(best, length)
        # a new vertex may touch only the current endpoint
        options = nb[last] & ~blocked
        while options:
            low = options & -options
            w = low.bit_length() - 1
            options ^= low
            extend(w, used | low, blocked | nb[last] | low, length + 1)

    for s in range(g.n):
        extend(s, 1 << s, 1 << s, 1)
    return best


@dataclass
class BoundReport:
    size: int
    vertex_count: int
    leaves_contained: bool
    missing_leaves: frozenset[int]
    induced_path_length: int | None = None
    prop6_holds: bool | None = None
    notes: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.leaves_contained and self.prop6_holds is not False


def lower_bound_check(g: Graph, members: Iterable[int], max_vertices: int = 14) -> BoundReport:
    """Check leaf containment and |M| >= |V| / L for a maximal-construction output."""
    members = frozenset(members)
    leaves = frozenset(v for v in range(g.n) if g.degree(v) == 1)
    report = BoundReport(len(members), g.n, leaves <= members, leaves - members)
    if g.n > max_vertices:
        report.notes.append(f"induced-path bound skipped: {g.n} vertices > {max_vertices}")
        return report
    L = longest_induced_path(g, max_vertices)
    report.induced_path_length = L
    report.prop6_holds = len(members) * L >= g.n
    return report


def overlay(grid: GridMap, g: Graph, members: Iterable[int], mark: str = "*") -> str:
    """Map text with member cells replaced by ``mark``."""
    if g.coords is None:
        raise ValueError("graph has no coordinates to overlay")
    rows = [list(r) for r in grid.rows]
    for v in members:
        r, c = g.coords[v]
        rows[r][c] = mark
    head = [f"type {grid.kind}", f"height {grid.height}", f"width {grid.width}", "map"]
    return "\n".join(head + ["".join(r) for r in rows]) + "\n"


def dump_vertex_set(vs: VertexSet, g: Graph, graph_id: str = "") -> str:
    return json.dumps(vs.to_json(graph_id, per_avg(g, vs.members) if vs.members else 1.0))
