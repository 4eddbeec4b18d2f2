"""Exact largest-WCS search and the brute-force oracle it is checked against."""

from __future__ import annotations

import itertools
import sys
import time
from collections import OrderedDict
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .errors import GraphTooLargeError
from .graph import Graph
from .wcs import (
    Classification,
    MwcsStrategy,
    StrategyKind,
    VertexSet,
    _Distances,
    additional_check,
    maximal_wcs,
    per_avg,
    verify_wcs,
)

BRUTE_FORCE_LIMIT = 18


@dataclass(frozen=True)
class SearchConfig:
    """Knobs for :func:`lwcs_dfs`.

    With ``exclusion`` on, each candidate is branched on as "take it" and then
    "never take it" in the sibling subtrees, so every set is generated once
    and the visited-set memo has nothing to catch; it is only consulted when
    ``exclusion`` is off.
    """

    deadline: float = 600.0
    memo_capacity: int = 200_000
    report_interval: float | None = None
    exclusion: bool = True
    use_memo: bool = True
    use_bound: bool = True
    tie_break_per: bool = True
    warm_start_restarts: int = 5
    seed: int = 0

    def __post_init__(self):
        if self.deadline <= 0:
            raise ValueError("deadline must be positive")


@dataclass
class SearchResult:
    best: VertexSet
    proven_optimal: bool
    nodes_expanded: int
    elapsed: float
    best_per: float
    history: list[tuple[float, int]] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "members": sorted(self.best.members),
            "size": len(self.best),
            "classification": self.best.classification.value,
            "per_avg": self.best_per,
            "proven_optimal": self.proven_optimal,
            "nodes_expanded": self.nodes_expanded,
            "elapsed": self.elapsed,
        }


class _Deadline(Exception):
    pass


class _Search:
    def __init__(self, g: Graph, config: SearchConfig):
        self.g = g
        self.cfg = config
        self.dist = _Distances(g)
        self.in_set = np.zeros(g.n, np.bool_)
        self.score = np.zeros(g.n, np.int64)
        self.totals = _kernels.distance_sums(g.indptr, g.indices)
        self.visited: OrderedDict[bytes, None] = OrderedDict()
        self.nodes = 0
        self.best: frozenset[int] = frozenset()
        self.best_per = 1.0
        self.history: list[tuple[float, int]] = []
        self.start = time.monotonic()
        self.stop_at = self.start + config.deadline
        self.next_report = None if config.report_interval is None else self.start

    def offer(self, members: frozenset[int], value: float | None = None):
        size = len(members)
        if size < len(self.best):
            return
        if size == len(self.best):
            if not self.cfg.tie_break_per or not self.best:
                return
            value = per_avg(self.g, members) if value is None else value
            if value <= self.best_per:
                return
        else:
            value = per_avg(self.g, members) if self.cfg.tie_break_per else 1.0
        self.best = members
        self.best_per = value
        self.history.append((time.monotonic() - self.start, size))

    def report(self):
        now = time.monotonic()
        if self.next_report is not None and now >= self.next_report:
            print(f"t={now - self.start:.2f} incumbent={len(self.best)} expanded={self.nodes}",
                  file=sys.stderr)
            self.next_report = now + self.cfg.report_interval

    def run(self, excluded: np.ndarray, size: int):
        if time.monotonic() > self.stop_at:
            raise _Deadline
        cfg = self.cfg
        if cfg.use_memo and not cfg.exclusion:
            key = np.packbits(self.in_set).tobytes()
            if key in self.visited:
                return
            self.visited[key] = None
            if len(self.visited) > cfg.memo_capacity:
                self.visited.popitem(last=False)
        self.nodes += 1
        self.report()
        if size >= len(self.best):
            self.offer(frozenset(np.flatnonzero(self.in_set).tolist()))
        cand, _ = _kernels.candidates(self.g.indptr, self.g.indices, self.in_set)
        cand &= ~excluded
        pool = np.flatnonzero(cand)
        best = len(self.best)
        if cfg.use_bound and self._pruned(size + len(pool), best):
            return
        keys = self.totals[pool] if size == 0 else self.score[pool]
        order = pool[np.argsort(keys, kind="stable")]
        excluded = excluded.copy() if cfg.exclusion else excluded
        remaining = len(order)
        for v in order:
            if cfg.use_bound and cfg.exclusion and self._pruned(size + remaining, len(self.best)):
                return
            v = int(v)
            row = self.dist.row(v)
            self.in_set[v] = True
            self.score += row
            try:
                self.run(excluded, size + 1)
            finally:
                self.in_set[v] = False
                self.score -= row
            if cfg.exclusion:
                excluded[v] = True
                remaining -= 1

    def _pruned(self, reachable: int, best: int) -> bool:
        # equal-size branches stay open only when they can improve PER
        return reachable < best if self.cfg.tie_break_per else reachable <= best


def lwcs_dfs(g: Graph, config: SearchConfig = SearchConfig(), forbidden=frozenset()) -> SearchResult:
    """Depth-first search for a largest well-connected set.

    Branches on the filtered candidates of the current set, pruning when
    the set plus its candidates cannot beat the incumbent. Equal-size
    incumbents are replaced only by sets with a higher average PER. A larger
    closed neighbourhood is swapped in at the end, which covers the sets the
    orphan filter never generates. ``forbidden`` vertices are never taken.
    """
    forbidden = frozenset(forbidden)
    search = _Search(g, config)
    if config.warm_start_restarts > 0 and g.n > 0:
        warm = maximal_wcs(g, MwcsStrategy(StrategyKind.GREEDY, config.seed, config.warm_start_restarts))
        if not warm.members & forbidden:
            search.offer(warm.members)
    excluded = np.zeros(g.n, np.bool_)
    excluded[list(forbidden)] = True
    limit = sys.getrecursionlimit()
    sys.setrecursionlimit(max(limit, 4 * g.n + 1000))
    proven = True
    try:
        search.run(excluded, 0)
    except _Deadline:
        proven = False
    finally:
        sys.setrecursionlimit(limit)
    final = additional_check(g, search.best, forbidden)
    if final != search.best:
        search.offer(final)
    return SearchResult(
        best=VertexSet(search.best, Classification.WCS),
        proven_optimal=proven,
        nodes_expanded=search.nodes,
        elapsed=time.monotonic() - search.start,
        best_per=search.best_per if config.tie_break_per else per_avg(g, search.best),
        history=search.history,
    )


def enumerate_wcs(g: Graph, size: int | None = None):
    """Every WCS (optionally of one size), by exhaustive subset enumeration."""
    if g.n > BRUTE_FORCE_LIMIT:
        raise GraphTooLargeError(f"{g.n} vertices exceeds the brute-force limit {BRUTE_FORCE_LIMIT}")
    sizes = range(g.n + 1) if size is None else (size,)
    for k in sizes:
        for combo in itertools.combinations(range(g.n), k):
            if verify_wcs(g, combo) is Classification.WCS:
                yield frozenset(combo)


def brute_force_lwcs(g: Graph) -> VertexSet:
    """Largest WCS by enumerating subsets from the top size down.

    Ties go to the higher average PER, then the lexicographically smallest
    sorted member list.
    """
    if g.n > BRUTE_FORCE_LIMIT:
        raise GraphTooLargeError(f"{g.n} vertices exceeds the brute-force limit {BRUTE_FORCE_LIMIT}")
    for k in range(g.n, -1, -1):
        found = list(enumerate_wcs(g, k))
        if found:
            best = min(found, key=lambda s: (-per_avg(g, s), sorted(s)))
            return VertexSet(best, Classification.WCS)
    return VertexSet(frozenset(), Classification.WCS)
