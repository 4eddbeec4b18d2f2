"""Instances, plans, validation and quality metrics for multi-robot path planning."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..errors import InfeasibleError, MapFormatError
from ..graph import Graph, GridMap, bfs_distances, load_map


@dataclass(frozen=True)
class MrppInstance:
    graph: Graph
    starts: tuple[int, ...]
    goals: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "starts", tuple(int(s) for s in self.starts))
        object.__setattr__(self, "goals", tuple(int(g) for g in self.goals))
        if len(self.starts) != len(self.goals):
            raise ValueError("starts and goals differ in length")
        if len(set(self.starts)) != len(self.starts):
            raise ValueError("starts are not pairwise distinct")
        if len(set(self.goals)) != len(self.goals):
            raise ValueError("goals are not pairwise distinct")
        for v in self.starts + self.goals:
            if not 0 <= v < self.graph.n:
                raise ValueError(f"vertex {v} outside the graph")

    @property
    def n(self) -> int:
        return len(self.starts)

    def distances(self) -> list[int]:
        """Single-robot shortest path length of every robot."""
        return [int(bfs_distances(self.graph, s)[g]) for s, g in zip(self.starts, self.goals)]

    def to_json(self, map_path: str | None = None) -> dict:
        coords = self.graph.coords
        if coords is None:
            return {"starts": list(self.starts), "goals": list(self.goals)}
        return {
            "map": map_path,
            "starts": [list(coords[v]) for v in self.starts],
            "goals": [list(coords[v]) for v in self.goals],
        }


def random_instance(g: Graph, n: int, rng: np.random.Generator) -> MrppInstance:
    """Uniform distinct starts and, independently, uniform distinct goals."""
    if n > g.n:
        raise InfeasibleError(f"{n} robots do not fit on {g.n} vertices")
    starts = rng.choice(g.n, size=n, replace=False)
    goals = rng.choice(g.n, size=n, replace=False)
    return MrppInstance(g, tuple(starts.tolist()), tuple(goals.tolist()))


def _cell(g: Graph, r: int, c: int) -> int:
    try:
        return g.vertex_of[(r, c)]
    except KeyError:
        raise MapFormatError(f"cell {(r, c)} is blocked or outside the main component") from None


def load_instance(path, connectivity: int = 4) -> tuple[GridMap, MrppInstance]:
    """Read a JSON instance ``{map, starts: [[r, c]..], goals: [[r, c]..]}``.

    A relative ``map`` path is resolved against the instance file.
    """
    path = Path(path)
    data = json.loads(path.read_text())
    map_path = Path(data["map"])
    if not map_path.is_absolute():
        map_path = path.parent / map_path
    grid = load_map(map_path, connectivity)
    g = grid.to_graph()
    starts = [_cell(g, r, c) for r, c in data["starts"]]
    goals = [_cell(g, r, c) for r, c in data["goals"]]
    return grid, MrppInstance(g, tuple(starts), tuple(goals))


@dataclass(frozen=True)
class ScenEntry:
    bucket: int
    map_name: str
    width: int
    height: int
    start: tuple[int, int]  # (row, col)
    goal: tuple[int, int]
    optimal_length: float


def parse_scen(text: str) -> list[ScenEntry]:
    """MovingAI ``.scen`` lines; x is the column and y the row."""
    out = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("version"):
            continue
        parts = line.split()
        if len(parts) != 9:
            raise MapFormatError(f"line {lineno}: expected 9 fields, found {len(parts)}")
        try:
            bucket, w, h, sx, sy, gx, gy = (int(parts[i]) for i in (0, 2, 3, 4, 5, 6, 7))
            opt = float(parts[8])
        except ValueError as exc:
            raise MapFormatError(f"line {lineno}: {exc}") from exc
        out.append(ScenEntry(bucket, parts[1], w, h, (sy, sx), (gy, gx), opt))
    return out


def scen_instance(g: Graph, entries: list[ScenEntry], n: int) -> MrppInstance:
    """First ``n`` scenario rows as one instance."""
    if n > len(entries):
        raise InfeasibleError(f"scenario has only {len(entries)} rows")
    rows = entries[:n]
    return MrppInstance(g, tuple(_cell(g, *e.start) for e in rows), tuple(_cell(g, *e.goal) for e in rows))


@dataclass
class Plan:
    """Per-robot vertex sequences, all of length makespan + 1."""

    paths: list[list[int]]

    @property
    def makespan(self) -> int:
        return max((len(p) for p in self.paths), default=1) - 1

    def padded(self) -> Plan:
        T = self.makespan
        return Plan([p + [p[-1]] * (T - len(p) + 1) for p in self.paths])

    @property
    def sum_of_costs(self) -> int:
        return sum(arrival_time(p) for p in self.paths)

    def to_json(self, g: Graph) -> list:
        if g.coords is None:
            return [list(p) for p in self.paths]
        return [[list(g.coords[v]) for v in p] for p in self.paths]


def arrival_time(path: list[int]) -> int:
    """First timestep from which the robot never leaves its final vertex."""
    t = len(path) - 1
    while t > 0 and path[t - 1] == path[-1]:
        t -= 1
    return t


def concat(*phases: Plan) -> Plan:
    """Chain phases robot-wise; each phase is padded to its own makespan first."""
    paths = [[v] for v in (p[0] for p in phases[0].paths)]
    for phase in phases:
        for i, p in enumerate(phase.padded().paths):
            if p[0] != paths[i][-1]:
                raise ValueError(f"robot {i}: phase starts at {p[0]}, previous ended at {paths[i][-1]}")
            paths[i].extend(p[1:])
    return Plan(paths)


@dataclass
class ValidationReport:
    ok: bool
    message: str = "OK"
    timestep: int | None = None
    makespan: int = 0
    sum_of_costs: int = 0

    def __bool__(self) -> bool:
        return self.ok


def validate_plan(g: Graph, instance: MrppInstance, plan: Plan) -> ValidationReport:
    """Check endpoints, moves, vertex conflicts and swaps; report the first failure."""
    if len(plan.paths) != instance.n:
        return ValidationReport(False, f"plan has {len(plan.paths)} paths for {instance.n} robots")
    if any(len(p) == 0 for p in plan.paths):
        return ValidationReport(False, "empty path")
    P = plan.padded().paths
    T = plan.makespan
    for i, p in enumerate(P):
        if p[0] != instance.starts[i]:
            return ValidationReport(False, f"robot {i} starts at {p[0]}, not {instance.starts[i]}", 0)
        if p[-1] != instance.goals[i]:
            return ValidationReport(False, f"robot {i} ends at {p[-1]}, not {instance.goals[i]}", T)
        for t in range(T):
            if p[t] != p[t + 1] and not g.has_edge(p[t], p[t + 1]):
                return ValidationReport(False, f"robot {i} jumps {p[t]}->{p[t + 1]}", t)
    for t in range(T + 1):
        at: dict[int, int] = {}
        for i, p in enumerate(P):
            if p[t] in at:
                return ValidationReport(False, f"robots {at[p[t]]} and {i} both at {p[t]}", t)
            at[p[t]] = i
        if t == T:
            break
        moves = {(p[t], p[t + 1]): i for i, p in enumerate(P) if p[t] != p[t + 1]}
        for (u, v), i in moves.items():
            j = moves.get((v, u))
            if j is not None:
                return ValidationReport(False, f"robots {i} and {j} swap over {u}-{v}", t)
    return ValidationReport(True, "OK", None, T, plan.sum_of_costs)


@dataclass
class PlanMetrics:
    makespan: int
    soc: int
    makespan_opt: float
    soc_opt: float
    extra: dict = field(default_factory=dict)


def plan_metrics(instance: MrppInstance, plan: Plan) -> PlanMetrics:
    """Makespan and SOC with their ratios to the single-robot lower bounds."""
    d = instance.distances()
    T, soc = plan.makespan, plan.sum_of_costs
    return PlanMetrics(
        T,
        soc,
        max(d, default=0) / T if T else 1.0,
        sum(d) / soc if soc else 1.0,
    )
