"""Three-phase planner through intermediate configurations on a well-connected set.

Robots first move, unlabeled, from their starts onto intermediate vertices of
M; a prioritized labeled phase inside M then brings each robot to the
intermediate vertex from which the reversed unlabeled goal phase delivers it
home.
"""

from __future__ import annotations

import graphlib
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linear_sum_assignment

from .. import _kernels
from ..errors import InfeasibleError
from ..graph import Graph, distance_matrix
from .flow import unlabeled_plan
from .instance import MrppInstance, Plan, concat, validate_plan
from .prioritized import Reservations, prioritized_plan, spacetime_astar


@dataclass
class Assignment:
    starts: list[int]  # S'', one vertex of M per start, in robot order
    goals: list[int]
    cost: int
    overlap: bool


def assign_intermediates(g: Graph, M: Iterable[int], S: Sequence[int], G: Sequence[int]) -> Assignment:
    """Min-cost placement of starts and goals onto distinct vertices of M.

    With 2n <= |M| all 2n requests share one assignment, so S'' and G'' are
    disjoint. Otherwise starts and goals are assigned separately and may
    overlap.
    """
    M = sorted(set(M))
    n = len(S)
    if len(G) != n:
        raise ValueError("starts and goals differ in length")
    if n > len(M):
        raise InfeasibleError(f"{n} robots exceed |M| = {len(M)}")
    if n == 0:
        return Assignment([], [], 0, False)
    d = distance_matrix(g, list(S) + list(G))[:, M]
    if 2 * n <= len(M):
        rows, cols = linear_sum_assignment(d)
        target = np.empty(2 * n, np.int64)
        target[rows] = np.asarray(M)[cols]
        cost = int(d[rows, cols].sum())
        return Assignment(target[:n].tolist(), target[n:].tolist(), cost, False)
    out = []
    cost = 0
    for block in (d[:n], d[n:]):
        rows, cols = linear_sum_assignment(block)
        target = np.empty(n, np.int64)
        target[rows] = np.asarray(M)[cols]
        out.append(target.tolist())
        cost += int(block[rows, cols].sum())
    return Assignment(out[0], out[1], cost, True)


@dataclass
class DependencyOrder:
    priority: list[int]
    relocations: list[tuple[int, int]] = field(default_factory=list)  # (robot, buffer vertex)


def dependency_ordering(S: Sequence[int], G: Sequence[int], M: Iterable[int]) -> DependencyOrder:
    """Order robots so that whoever sits on another robot's goal moves first.

    When s_i = g_j robot i is planned before j. Every robot has at most one
    such successor, so the digraph is a union of paths and cycles; one robot
    per cycle is sent to a spare vertex of M outside S and G beforehand.
    """
    n = len(S)
    S = list(S)
    goal_owner = {v: j for j, v in enumerate(G)}
    spare = sorted(set(M) - set(S) - set(G))
    relocations = []
    while True:
        ts = graphlib.TopologicalSorter({i: () for i in range(n)})
        for i, v in enumerate(S):
            j = goal_owner.get(v)
            if j is not None and j != i:
                ts.add(j, i)
        try:
            order = list(ts.static_order())
            return DependencyOrder(order, relocations)
        except graphlib.CycleError as exc:
            cycle = exc.args[1]
            if not spare:
                raise InfeasibleError("dependency cycle but no spare vertex in M") from None
            robot = min(cycle[:-1])
            buffer = spare.pop(0)
            relocations.append((robot, buffer))
            S[robot] = buffer


@dataclass
class UnppResult:
    plan: Plan | None
    phases: tuple[int, int, int] = (0, 0, 0)  # makespans of start, middle, goal phases
    overlap: bool = False
    message: str = "OK"

    @property
    def success(self) -> bool:
        return self.plan is not None


def _relocation_legs(g: Graph, current: list[int], relocations) -> Plan | None:
    """Move each relocated robot alone to its buffer while the others wait."""
    legs = []
    for robot, buffer in relocations:
        res = Reservations()
        for j, v in enumerate(current):
            if j != robot:
                res.permanent[v] = 0
        path = spacetime_astar(g, current[robot], buffer, res, g.n)
        if path is None:
            return None
        legs.append(Plan([path if j == robot else [v] for j, v in enumerate(current)]))
        current[robot] = buffer
    return concat(*legs) if legs else None


def is_well_formed(g: Graph, instance: MrppInstance) -> bool:
    """Every robot reaches its goal without touching another robot's start or goal."""
    ends = set(instance.starts) | set(instance.goals)
    for s, t in zip(instance.starts, instance.goals):
        enter = np.ones(g.n, np.bool_)
        enter[list(ends - {s, t})] = False
        if _kernels.bfs(g.indptr, g.indices, enter, enter, s)[t] < 0:
            return False
    return True


def unpp(g: Graph, M: Iterable[int], instance: MrppInstance, rng: np.random.Generator | None = None,
         order: Sequence[int] | None = None, direct: bool = True) -> UnppResult:
    """Plan through intermediate configurations on the WCS ``M``.

    The middle phase uses ``order`` if given, a random order when the
    intermediates are disjoint, and a dependency order when they overlap.
    With ``direct`` an instance that is already well-formed is planned
    straight from S to G, which prioritized planning solves under any order.
    """
    M = sorted(set(M))
    n = instance.n
    if n >= len(M) and n > 0:
        raise InfeasibleError(f"{n} robots need |M| > n, have {len(M)}")
    if n == 0:
        return UnppResult(Plan([]))
    rng = np.random.default_rng() if rng is None else rng
    if direct and is_well_formed(g, instance):
        priority = rng.permutation(n).tolist() if order is None else list(order)
        plan = prioritized_plan(g, instance.starts, instance.goals, priority)
        if plan is not None and validate_plan(g, instance, plan):
            return UnppResult(plan, (0, plan.makespan, 0))
    assign = assign_intermediates(g, M, instance.starts, instance.goals)
    start_phase = unlabeled_plan(g, instance.starts, assign.starts)
    goal_phase = unlabeled_plan(g, instance.goals, assign.goals)
    mid_starts = list(start_phase.ends)
    mid_goals = list(goal_phase.ends)

    pre = None
    if assign.overlap:
        try:
            dep = dependency_ordering(mid_starts, mid_goals, M)
        except InfeasibleError as exc:
            return UnppResult(None, overlap=True, message=str(exc))
        if dep.relocations:
            pre = _relocation_legs(g, mid_starts, dep.relocations)
            if pre is None:
                return UnppResult(None, overlap=True, message="relocation failed")
        priority = dep.priority if order is None else list(order)
    elif order is None:
        priority = rng.permutation(n).tolist()
    else:
        priority = list(order)

    middle = prioritized_plan(g, mid_starts, mid_goals, priority)
    if middle is None:
        return UnppResult(None, overlap=assign.overlap, message="middle phase failed")
    if pre is not None:
        middle = concat(pre, middle)
    back = Plan([p[::-1] for p in goal_phase.plan.padded().paths])
    plan = concat(start_phase.plan, middle, back)
    report = validate_plan(g, instance, plan)
    if not report:
        # never hand out a plan the validator rejects
        return UnppResult(None, overlap=assign.overlap, message=f"invalid plan: {report.message}")
    return UnppResult(plan, (start_phase.horizon, middle.makespan, goal_phase.horizon), assign.overlap)


def makespan_bound(g: Graph, n: int) -> int:
    """2(n + |V| - 1) + n D(G)."""
    return 2 * (n + g.n - 1) + n * g.diameter
