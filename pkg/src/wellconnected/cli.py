"""Command-line front end: ``wcs``, ``reduce``, ``mrpp`` and ``bench``.

Exit codes: 0 ok, 2 invalid input or a failed validation, 3 infeasible
configuration.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict
from pathlib import Path

import numpy as np

from . import bench
from .errors import InfeasibleError, WcsError
from .graph import GridMap, build_grid, load_map
from .mrpp.instance import load_instance, parse_scen, plan_metrics, scen_instance, validate_plan
from .mrpp.prioritized import hca_star
from .mrpp.unpp import unpp
from .sat import decide_sat, parse_dimacs, reduce_to_lwcs
from .wcs import overlay

EXIT_OK, EXIT_INVALID, EXIT_INFEASIBLE = 0, 2, 3


def _emit(obj, out: str | None) -> None:
    text = json.dumps(obj, indent=2)
    if out:
        Path(out).write_text(text + "\n")
    else:
        print(text)


def cmd_wcs(args) -> int:
    if args.source == "grid":
        width = args.width or args.side
        height = args.height or args.side
        if not width or not height:
            raise WcsError("grid needs --side or --width/--height")
        g = build_grid(width, height, args.conn)
        grid, graph_id = None, f"grid{width}x{height}c{args.conn}"
    else:
        grid = load_map(bench.resolve_fixture(args.file), args.conn)
        g = grid.to_graph()
        graph_id = Path(args.file).stem
    row, members = bench.solve_wcs(g, args.algo, args.restarts, args.seed, args.time_limit, graph_id)
    print(f"|V|={row.vertices} |E|={row.edges} |M|={row.size} PER={row.per_avg:.4f} "
          f"time={row.elapsed:.2f}s" + ("" if row.proven_optimal is None else f" optimal={row.proven_optimal}"))
    if args.json:
        _emit({**asdict(row), "members": sorted(members)}, args.json)
    if args.overlay:
        if grid is None:
            grid = GridMap(height, width, tuple("." * width for _ in range(height)))
        Path(args.overlay).write_text(overlay(grid, g, members))
    return EXIT_OK


def cmd_reduce(args) -> int:
    formula = parse_dimacs(Path(args.file).read_text())
    r = reduce_to_lwcs(formula)
    if args.emit_graph or not args.decide:
        _emit(r.to_json(), args.out)
    if args.decide:
        d = decide_sat(formula, args.deadline)
        print(d.verdict.value)
        if d.assignment is not None:
            print(" ".join(str(v if val else -v) for v, val in sorted(d.assignment.items())))
    return EXIT_OK


def _single_instance(args) -> int:
    path = bench.resolve_fixture(args.instance)
    if path.suffix == ".scen":
        entries = parse_scen(path.read_text())
        if not entries:
            raise WcsError("scenario file has no rows")
        grid = load_map(bench.resolve_fixture(path.parent / entries[0].map_name), args.conn)
        inst = scen_instance(grid.to_graph(), entries, args.n[0])
    else:
        grid, inst = load_instance(path, args.conn)
    g = inst.graph
    rng = np.random.default_rng(args.seed)
    if args.algo == "hca":
        plan = hca_star(g, inst, rng=rng)
    else:
        _, M = bench.solve_wcs(g, "greedy", args.wcs_restarts, args.seed)
        plan = unpp(g, M, inst, rng).plan
    if plan is None:
        print("FAIL")
        return EXIT_INVALID
    report = validate_plan(g, inst, plan)
    if not report:
        print(f"invalid plan: {report.message} at t={report.timestep}")
        return EXIT_INVALID
    m = plan_metrics(inst, plan)
    print(f"OK makespan={m.makespan} soc={m.soc} makespan_opt={m.makespan_opt:.3f} soc_opt={m.soc_opt:.3f}")
    if args.plan_out:
        _emit(plan.to_json(g), args.plan_out)
    return EXIT_OK


def cmd_mrpp(args) -> int:
    if args.instance:
        return _single_instance(args)
    if args.map:
        g = load_map(bench.resolve_fixture(args.map), args.conn).to_graph()
    else:
        g = build_grid(args.side, args.side, args.conn)
    _, M = bench.solve_wcs(g, "greedy", args.wcs_restarts, args.seed)
    planners = ["unpp", "hca"] if args.algo == "both" else [args.algo]
    rows = bench.mrpp_suite(g, M, args.n, args.trials, args.seed, planners)
    if args.csv:
        bench.write_csv(args.csv, rows)
    else:
        w = None
        for r in rows:
            d = asdict(r)
            if w is None:
                print(",".join(d))
                w = True
            print(",".join("" if v is None else str(v) for v in d.values()))
    print(f"|V|={g.n} |M|={len(M)}", file=sys.stderr)
    for s in bench.summarize(rows):
        print(f"{s['algo']} n={s['n']} success={s['success_rate']:.2f} "
              f"makespan_opt={s['makespan_opt']} soc_opt={s['soc_opt']} time_ms={s['time_ms']:.1f}",
              file=sys.stderr)
    if "unpp" in planners and all(n >= len(M) for n in args.n):
        return EXIT_INFEASIBLE
    return EXIT_OK


def cmd_bench(args) -> int:
    spec = bench.ExperimentSpec.load(args.spec)
    summary = bench.run_spec(spec, args.out)
    if "slope" in summary:
        for r in summary["rows"]:
            print(f"{r['graph_id']}: |V|={r['vertices']} |M|={r['size']}")
        print(f"slope={summary['slope']:.4f}")
    else:
        _emit(summary, None)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="wellconnected", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    w = sub.add_parser("wcs", help="compute a well-connected set")
    w.add_argument("source", choices=["grid", "map"])
    w.add_argument("--side", type=int)
    w.add_argument("--width", type=int)
    w.add_argument("--height", type=int)
    w.add_argument("--file", help="MovingAI .map file")
    w.add_argument("--conn", type=int, choices=[4, 8], default=4)
    w.add_argument("--algo", choices=["random", "greedy", "dfs"], default="greedy")
    w.add_argument("--restarts", type=int, default=50)
    w.add_argument("--seed", type=int, default=0)
    w.add_argument("--time-limit", type=float, default=600.0)
    w.add_argument("--json", help="write members and stats as JSON")
    w.add_argument("--overlay", help="write the map with members marked")
    w.set_defaults(func=cmd_wcs)

    r = sub.add_parser("reduce", help="reduce a 3-CNF formula to a largest-WCS instance")
    r.add_argument("file")
    r.add_argument("--decide", action="store_true")
    r.add_argument("--emit-graph", action="store_true")
    r.add_argument("--deadline", type=float, default=60.0)
    r.add_argument("--out")
    r.set_defaults(func=cmd_reduce)

    m = sub.add_parser("mrpp", help="run random multi-robot instances")
    m.add_argument("--map")
    m.add_argument("--side", type=int, default=10)
    m.add_argument("--conn", type=int, choices=[4, 8], default=4)
    m.add_argument("--n", type=int, nargs="+", default=[1])
    m.add_argument("--instance", help="JSON instance or MovingAI .scen (first --n rows)")
    m.add_argument("--plan-out", help="write the plan as JSON [r, c] sequences")
    m.add_argument("--trials", type=int, default=50)
    m.add_argument("--algo", choices=["unpp", "hca", "both"], default="both",
                   help="'both' runs unpp for a single --instance")
    m.add_argument("--wcs-restarts", type=int, default=50)
    m.add_argument("--seed", type=int, default=0)
    m.add_argument("--csv")
    m.set_defaults(func=cmd_mrpp)

    b = sub.add_parser("bench", help="run an experiment spec")
    b.add_argument("spec")
    b.add_argument("--out", default="bench_out")
    b.set_defaults(func=cmd_bench)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InfeasibleError as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (WcsError, FileNotFoundError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
