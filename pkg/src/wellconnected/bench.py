"""Experiment harness: grid capacity sweeps, map WCS runs and MRPP suites."""

from __future__ import annotations

import csv
import enum
import json
import os
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .errors import InfeasibleError, WcsError
from .graph import Graph, build_grid, load_map
from .mrpp.instance import plan_metrics, random_instance, validate_plan
from .mrpp.prioritized import hca_star
from .mrpp.unpp import unpp
from .search import SearchConfig, lwcs_dfs
from .wcs import MwcsStrategy, maximal_wcs, per_avg

FIXTURES_ENV = "WCS_FIXTURES"
DEFAULT_FIXTURES = Path(__file__).resolve().parents[2] / "fixtures"


def fixtures_dir() -> Path:
    return Path(os.environ.get(FIXTURES_ENV, DEFAULT_FIXTURES))


def resolve_fixture(path) -> Path:
    """Use ``path`` as given if it exists, else look it up in the fixtures dir."""
    p = Path(path)
    if p.exists():
        return p
    alt = fixtures_dir() / p.name
    if alt.exists():
        return alt
    raise FileNotFoundError(f"{path} not found (also looked in {fixtures_dir()})")


def trial_seeds(seed: int, count: int) -> list[int]:
    """Per-trial integer seeds split deterministically from one master seed."""
    return [int(s.generate_state(1)[0]) for s in np.random.SeedSequence(seed).spawn(count)]


class ExperimentKind(enum.Enum):
    GRID_WCS = "GRID_WCS"
    MAP_WCS = "MAP_WCS"
    MRPP = "MRPP"


@dataclass
class ExperimentSpec:
    kind: ExperimentKind
    sides: list[int] = field(default_factory=list)
    maps: list[str] = field(default_factory=list)
    connectivity: int = 4
    algo: str = "greedy"
    restarts: int = 50
    seed: int = 0
    robot_fractions: list[float] = field(default_factory=list)
    robots: list[int] = field(default_factory=list)
    trials: int = 50
    deadline: float = 600.0
    planners: list[str] = field(default_factory=lambda: ["unpp", "hca"])

    def __post_init__(self):
        if isinstance(self.kind, str):
            self.kind = ExperimentKind(self.kind.upper())
        if self.connectivity not in (4, 8):
            raise WcsError(f"connectivity must be 4 or 8, got {self.connectivity}")
        if self.algo not in ("random", "greedy", "dfs"):
            raise WcsError(f"unknown algorithm {self.algo!r}")
        if self.kind is ExperimentKind.GRID_WCS and not self.sides:
            raise WcsError("grid sweep needs at least one side length")
        if self.kind is not ExperimentKind.GRID_WCS and not self.maps:
            raise WcsError(f"{self.kind.value} experiment needs at least one map")
        if any(s < 1 for s in self.sides):
            raise WcsError("side lengths must be positive")
        for p in self.planners:
            if p not in ("unpp", "hca"):
                raise WcsError(f"unknown planner {p!r}")

    @classmethod
    def load(cls, path) -> ExperimentSpec:
        data = json.loads(Path(path).read_text())
        unknown = set(data) - set(cls.__dataclass_fields__)
        if unknown:
            raise WcsError(f"unknown spec keys: {sorted(unknown)}")
        return cls(**data)


@dataclass
class WcsRow:
    graph_id: str
    vertices: int
    edges: int
    size: int
    per_avg: float
    elapsed: float
    proven_optimal: bool | None = None


def solve_wcs(g: Graph, algo: str, restarts: int = 50, seed: int = 0,
              deadline: float = 600.0, graph_id: str = "") -> tuple[WcsRow, frozenset[int]]:
    t0 = time.perf_counter()
    proven = None
    if algo == "dfs":
        result = lwcs_dfs(g, SearchConfig(deadline=deadline, seed=seed))
        members, proven = result.best.members, result.proven_optimal
    else:
        members = maximal_wcs(g, MwcsStrategy(algo, seed, restarts)).members
    elapsed = time.perf_counter() - t0
    row = WcsRow(graph_id, g.n, g.edge_count, len(members), per_avg(g, members), elapsed, proven)
    return row, members


def fit_slope(rows: list[WcsRow]) -> float:
    """Least-squares slope of |M| against |V| through the origin."""
    v = np.array([r.vertices for r in rows], float)
    m = np.array([r.size for r in rows], float)
    return float((m * v).sum() / (v * v).sum())


def grid_sweep(spec: ExperimentSpec) -> tuple[list[WcsRow], float]:
    rows = []
    for side in spec.sides:
        g = build_grid(side, side, spec.connectivity)
        row, _ = solve_wcs(g, spec.algo, spec.restarts, spec.seed, spec.deadline,
                           f"grid{side}x{side}c{spec.connectivity}")
        rows.append(row)
    return rows, fit_slope(rows)


@dataclass
class MrppRow:
    seed: int
    algo: str
    n: int
    success: bool
    makespan: int | None
    soc: int | None
    makespan_opt: float | None
    soc_opt: float | None
    time_ms: float
    note: str = ""


def mrpp_trial(g: Graph, M, n: int, seed: int, algo: str) -> MrppRow:
    """One seeded instance; only validator-approved plans count as successes."""
    rng = np.random.default_rng(seed)
    instance = random_instance(g, n, rng)
    t0 = time.perf_counter()
    note = ""
    plan = None
    try:
        if algo == "unpp":
            result = unpp(g, M, instance, rng)
            plan, note = result.plan, ("" if result.success else result.message)
        else:
            plan = hca_star(g, instance, rng=rng)
            note = "" if plan is not None else "deadlock"
    except InfeasibleError as exc:
        note = f"infeasible: {exc}"
    elapsed = (time.perf_counter() - t0) * 1000
    if plan is not None and not validate_plan(g, instance, plan):
        plan, note = None, "rejected by validator"
    if plan is None:
        return MrppRow(seed, algo, n, False, None, None, None, None, elapsed, note)
    m = plan_metrics(instance, plan)
    return MrppRow(seed, algo, n, True, m.makespan, m.soc, m.makespan_opt, m.soc_opt, elapsed)


def mrpp_suite(g: Graph, M, robot_counts, trials: int, seed: int, planners=("unpp", "hca")) -> list[MrppRow]:
    """Same seeded instances for every planner; rows sorted by (algo, n, seed)."""
    rows = []
    for n in robot_counts:
        for s in trial_seeds(seed + n, trials):
            for algo in planners:
                rows.append(mrpp_trial(g, M, n, s, algo))
    rows.sort(key=lambda r: (r.algo, r.n, r.seed))
    return rows


def summarize(rows: list[MrppRow]) -> list[dict]:
    out = []
    keys = sorted({(r.algo, r.n) for r in rows})
    for algo, n in keys:
        group = [r for r in rows if r.algo == algo and r.n == n]
        ok = [r for r in group if r.success]
        out.append({
            "algo": algo,
            "n": n,
            "trials": len(group),
            "success_rate": len(ok) / len(group),
            "makespan_opt": float(np.mean([r.makespan_opt for r in ok])) if ok else None,
            "soc_opt": float(np.mean([r.soc_opt for r in ok])) if ok else None,
            "time_ms": float(np.mean([r.time_ms for r in group])),
        })
    return out


def write_csv(path, rows) -> None:
    rows = [asdict(r) if not isinstance(r, dict) else r for r in rows]
    if not rows:
        Path(path).write_text("")
        return
    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=list(rows[0]))
        w.writeheader()
        w.writerows(rows)


def run_spec(spec: ExperimentSpec, out_dir) -> dict:
    """Run one experiment spec, writing CSVs under ``out_dir``; returns a summary."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    if spec.kind is ExperimentKind.GRID_WCS:
        rows, slope = grid_sweep(spec)
        for r in rows:
            write_csv(out_dir / f"{r.graph_id}.csv", [r])
        write_csv(out_dir / "sweep.csv", rows)
        return {"slope": slope, "rows": [asdict(r) for r in rows]}
    summary: dict = {"maps": {}}
    for name in spec.maps:
        path = resolve_fixture(name)
        g = load_map(path, spec.connectivity).to_graph()
        row, M = solve_wcs(g, spec.algo, spec.restarts, spec.seed, spec.deadline, path.stem)
        entry: dict = {"wcs": asdict(row)}
        if spec.kind is ExperimentKind.MRPP:
            counts = list(spec.robots) + [max(1, int(f * len(M))) for f in spec.robot_fractions]
            rows = mrpp_suite(g, M, sorted(set(counts)), spec.trials, spec.seed, spec.planners)
            write_csv(out_dir / f"{path.stem}_mrpp.csv", rows)
            entry["summary"] = summarize(rows)
        else:
            write_csv(out_dir / f"{path.stem}_wcs.csv", [row])
        summary["maps"][path.stem] = entry
    return summary
