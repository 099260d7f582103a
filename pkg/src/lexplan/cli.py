"""Command-line entry point: ``lexplan run | criteria-study | benchmark | validate``."""
from __future__ import annotations

import argparse
import csv
import json
import logging
import math
import sys
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .errors import PlanningError, ScenarioError
from .render import render_run, render_scaling
from .scenario_io import SCHEMA_VERSION, load_scenario
from .sim import RunMetrics, Scenario, run_scenario
from .study import HIERARCHIES, criteria_study, linear_fit_r2, run_benchmark

log = logging.getLogger("lexplan")

EXIT_GOAL = 0
EXIT_ERROR = 1
EXIT_TIMEOUT = 2

TRACE_HEADER = ("schema_version", "tick", "x", "y", "heading", "kind")
BENCH_HEADER = ("schema_version", "density", "node_count", "edge_count", "K", "construction_seconds",
                "search_naive_seconds", "search_heap_seconds", "repetitions")
MAX_OBSTACLE_FRAMES = 8


def _overrides(args) -> list[str]:
    sets = list(args.set or [])
    if getattr(args, "seed", None) is not None:
        sets.append(f"sim.seed={args.seed}")
    return sets


def _load(args) -> Scenario:
    return load_scenario(args.scenario, _overrides(args))


def write_trace_csv(metrics: RunMetrics, path: Path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(TRACE_HEADER)
        for row in metrics.trace:
            w.writerow((SCHEMA_VERSION, row.tick, repr(row.pose.x), repr(row.pose.y), repr(row.pose.heading),
                        row.kind))


def write_metrics_json(metrics: RunMetrics, path: Path) -> None:
    path.write_text(json.dumps(metrics.to_dict(), indent=1, sort_keys=True) + "\n")


def write_timings_json(metrics: RunMetrics, path: Path) -> None:
    rows = [{"tick": r.tick, "construction_seconds": r.construction_seconds, "search_seconds": r.search_seconds}
            for r in metrics.replans]
    path.write_text(json.dumps({"schema_version": SCHEMA_VERSION, "replans": rows}, indent=1) + "\n")


def _obstacle_frames(scenario: Scenario, ticks: int) -> list[np.ndarray]:
    if all(c.is_static for c in scenario.obstacles):
        return [scenario.obstacle_points_at(0.0)]
    n = min(MAX_OBSTACLE_FRAMES, ticks + 1)
    sample = sorted({int(round(t)) for t in np.linspace(0, ticks, n)})
    return [scenario.obstacle_points_at(t * scenario.sim.tick_dt) for t in sample]


def write_run_svg(scenario: Scenario, metrics: RunMetrics, path: Path) -> None:
    trace = np.array([p.xy for p in metrics.executed_path])
    replanned = [np.asarray(pts) for _, pts in metrics.emitted_paths]
    svg = render_run(scenario.reference_path.vertices, _obstacle_frames(scenario, metrics.ticks_elapsed),
                     trace, replanned, title=scenario.name)
    path.write_text(svg)


def cmd_run(args) -> int:
    try:
        scenario = _load(args)
    except ScenarioError as exc:
        print(f"error: invalid scenario: {exc}", file=sys.stderr)
        return EXIT_ERROR
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    metrics = run_scenario(scenario)
    write_metrics_json(metrics, out / "metrics.json")
    write_trace_csv(metrics, out / "trace.csv")
    write_timings_json(metrics, out / "timings.json")
    write_run_svg(scenario, metrics, out / "run.svg")
    if metrics.error:
        print(f"error: {metrics.error}", file=sys.stderr)
        return EXIT_ERROR
    if metrics.goal_reached:
        print(f"{scenario.name}: goal reached after {metrics.ticks_elapsed} ticks, {metrics.replan_count} replans")
        return EXIT_GOAL
    print(f"{scenario.name}: timeout after {metrics.ticks_elapsed} ticks "
          f"({len(metrics.hold_intervals)} hold intervals)")
    return EXIT_TIMEOUT


def cmd_validate(args) -> int:
    try:
        scenario = _load(args)
    except ScenarioError as exc:
        print(f"error: invalid scenario: {exc}", file=sys.stderr)
        return EXIT_ERROR
    print(f"{scenario.name}: ok ({len(scenario.obstacles)} obstacle clusters, "
          f"reference length {scenario.reference_path.length:.2f} m)")
    return EXIT_GOAL


def cmd_criteria_study(args) -> int:
    try:
        scenario = _load(args)
        rows = criteria_study(scenario)
    except ScenarioError as exc:
        print(f"error: invalid scenario: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except PlanningError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    print(f"{'hierarchy':<28}{'risk':>10}{'heading[deg]':>14}{'distance[m]':>13}")
    for r in rows:
        print(f"{','.join(r.hierarchy):<28}{r.risk:>10.3f}{r.heading_deg:>14.2f}{r.distance:>13.3f}")
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        doc = {
            "schema_version": SCHEMA_VERSION,
            "scenario": scenario.name,
            "rows": [{"hierarchy": list(r.hierarchy), "risk": r.risk, "heading": r.heading,
                      "heading_deg": r.heading_deg, "distance": r.distance, "path": r.path} for r in rows],
        }
        (out / "criteria.json").write_text(json.dumps(doc, indent=1) + "\n")
    return EXIT_GOAL


def write_bench_csv(records, path: Path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(BENCH_HEADER)
        for r in records:
            w.writerow((SCHEMA_VERSION, r.density, r.node_count, r.edge_count, r.k, r.construction_seconds,
                        r.search_naive_seconds, r.search_heap_seconds, r.repetitions))


def write_bench_svg(records, path: Path) -> None:
    series = {}
    ks = sorted({r.k for r in records})
    first_k = [r for r in records if r.k == ks[0]]
    series["construction"] = ([r.node_count for r in first_k], [r.construction_seconds for r in first_k])
    for k in ks:
        rows = [r for r in records if r.k == k]
        series[f"naive K={k}"] = ([r.node_count for r in rows], [r.search_naive_seconds for r in rows])
        series[f"heap K={k}"] = ([r.node_count for r in rows], [r.search_heap_seconds for r in rows])
    path.write_text(render_scaling(series, title="runtime vs node count"))


def cmd_benchmark(args) -> int:
    try:
        records = run_benchmark(args.density, args.k_levels, args.reps, seed=args.seed or 0)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    write_bench_csv(records, out / "bench.csv")
    write_bench_svg(records, out / "bench.svg")
    for r in records:
        print(f"nodes={r.node_count:>6} edges={r.edge_count:>7} K={r.k} construct={r.construction_seconds:.4f}s "
              f"naive={r.search_naive_seconds:.4f}s heap={r.search_heap_seconds:.4f}s")
    first_k = [r for r in records if r.k == records[0].k]
    if len(first_k) >= 3:
        _, _, r2 = linear_fit_r2([r.node_count for r in first_k], [r.construction_seconds for r in first_k])
        print(f"construction vs nodes: R^2 = {r2:.4f}")
    return EXIT_GOAL


def _float_list(text: str) -> list[float]:
    try:
        values = [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None
    if not values or not all(v > 0 and math.isfinite(v) for v in values):
        raise argparse.ArgumentTypeError("values must be positive")
    return values


def _k_list(text: str) -> list[int]:
    try:
        values = [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None
    if not values or any(v not in HIERARCHIES for v in values):
        raise argparse.ArgumentTypeError(f"K must be one of {sorted(HIERARCHIES)}")
    return values


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lexplan", description="Lexicographic receding-horizon path planner.")
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    sub = parser.add_subparsers(dest="command", required=True)

    def scenario_args(p, out_required: bool) -> None:
        p.add_argument("--scenario", required=True, help="scenario JSON file or bundled scenario name")
        p.add_argument("--out", required=out_required, help="output directory")
        p.add_argument("--seed", type=int, help="override sim.seed")
        p.add_argument("--set", action="append", metavar="KEY=VALUE",
                       help="dotted-path override, e.g. graph_config.d_span=1.5 (repeatable)")

    scenario_args(sub.add_parser("run", help="simulate a scenario and write metrics, trace and render"), True)
    scenario_args(sub.add_parser("criteria-study", help="plan under each cost hierarchy and compare costs"), False)
    scenario_args(sub.add_parser("validate", help="parse and validate a scenario file"), False)

    b = sub.add_parser("benchmark", help="time lattice construction and both searches")
    b.add_argument("--out", required=True, help="output directory")
    b.add_argument("--density", type=_float_list, default=[10.0, 20.0, 30.0, 40.0, 50.0, 57.0],
                   help="lattice densities in nodes per metre, comma-separated")
    b.add_argument("--k-levels", type=_k_list, default=[1, 2, 3], help="hierarchy depths, comma-separated")
    b.add_argument("--reps", type=int, default=5, help="timed repetitions per point (median reported)")
    b.add_argument("--seed", type=int, default=0, help="obstacle layout seed")
    return parser


COMMANDS = {
    "run": cmd_run,
    "criteria-study": cmd_criteria_study,
    "benchmark": cmd_benchmark,
    "validate": cmd_validate,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    return COMMANDS[args.command](args)


if __name__ == "__main__":
    sys.exit(main())
