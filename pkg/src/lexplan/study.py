"""Criteria-combination study and search/construction runtime benchmark."""
from __future__ import annotations

import dataclasses
import gc
import math
import statistics
import time
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .costs import CostConfig
from .errors import PlanningError
from .geometry import ObstacleSet, Pose2D, ReferencePath
from .graph import GraphConfig, generate_graph
from .search import extract_path, lex_search_heap, lex_search_naive
from .sim import Scenario, World

HIERARCHIES = {
    1: ("distance",),
    2: ("heading", "distance"),
    3: ("risk", "heading", "distance"),
}


@dataclass
class CriteriaRow:
    hierarchy: tuple[str, ...]
    risk: float
    heading: float
    distance: float
    path: list[tuple[float, float]]

    @property
    def heading_deg(self) -> float:
        return math.degrees(self.heading)


def first_replan_input(scenario: Scenario) -> tuple[Pose2D, ObstacleSet, ReferencePath]:
    """Simulate until the planner first rebuilds its lattice and return what it saw."""
    world = World(scenario)
    while world.tick < scenario.sim.max_ticks:
        world.step()
        if world.planner.last_replan_input is not None:
            return world.planner.last_replan_input
    raise PlanningError(f"scenario {scenario.name!r} never triggered a replan")


def criteria_study(scenario: Scenario, hierarchies: Sequence[Sequence[str]] = tuple(HIERARCHIES.values())
                   ) -> list[CriteriaRow]:
    """Plan once under each hierarchy and measure all three costs of the lattice path.

    Costs outside a hierarchy are still measured, for reference only.
    """
    x_c, obstacles, ref = first_replan_input(scenario)
    rows = []
    for hierarchy in hierarchies:
        ccfg = dataclasses.replace(scenario.cost_config, hierarchy=tuple(hierarchy))
        g = generate_graph(ref, x_c, obstacles, scenario.graph_config, ccfg)
        result = lex_search_heap(g, g.init_node, ccfg.tie_epsilon)
        nodes = extract_path(result, g.goal_node)
        if nodes is None:
            raise PlanningError(f"no lattice path under hierarchy {hierarchy}")
        risk, heading, distance = g.full_path_cost(nodes)
        rows.append(CriteriaRow(tuple(hierarchy), risk, heading, distance,
                                [tuple(map(float, g.positions[i])) for i in nodes]))
    return rows


@dataclass
class BenchmarkRecord:
    density: float
    node_count: int
    edge_count: int
    k: int
    construction_seconds: float
    search_naive_seconds: float
    search_heap_seconds: float
    repetitions: int


def benchmark_world(density: float, seed: int = 0, d_span: float = 1.0,
                    n_clusters: int = 6) -> tuple[ReferencePath, Pose2D, ObstacleSet, GraphConfig]:
    """Straight reference with seeded obstacle clusters; lattice spacing = 1 / density."""
    step = 1.0 / density
    gcfg = GraphConfig(d_span=d_span, station_step=step, lateral_step=min(step, d_span))
    ref = ReferencePath.from_points([(0.0, 0.0), (gcfg.d_roll + 5.0, 0.0)])
    rng = np.random.default_rng(seed)
    pts = []
    # keep the start and the roll-in target clear
    xs = np.linspace(1.5, gcfg.d_roll - 1.5, n_clusters)
    for x in xs:
        cy = rng.uniform(-0.8 * d_span, 0.8 * d_span)
        r = rng.uniform(0.1, 0.25)
        a = np.linspace(0.0, 2 * math.pi, 24, endpoint=False)
        pts.append(np.column_stack((x + r * np.cos(a), cy + r * np.sin(a))))
    return ref, Pose2D(0.0, 0.0, 0.0), ObstacleSet(np.vstack(pts)), gcfg


def _median_times(fns: Sequence, repetitions: int) -> list[float]:
    """Median wall time of each callable, after one discarded warm-up of each.

    Repetitions run round-robin across ``fns`` so a burst of outside load on
    the machine spreads over every measurement instead of skewing one of them.
    """
    for fn in fns:
        fn()  # warm-up, discarded
    times: list[list[float]] = [[] for _ in fns]
    # like timeit: keep cyclic GC pauses out of the measurement
    enabled = gc.isenabled()
    try:
        for _ in range(repetitions):
            for fn, acc in zip(fns, times):
                gc.collect()
                gc.disable()
                t0 = time.perf_counter()
                fn()
                acc.append(time.perf_counter() - t0)
                if enabled:
                    gc.enable()
    finally:
        if enabled:
            gc.enable()
    return [statistics.median(t) for t in times]


def run_benchmark(densities: Sequence[float], k_levels: Sequence[int] = (1, 2, 3), repetitions: int = 5,
                  seed: int = 0, ccfg: Optional[CostConfig] = None,
                  naive_max_nodes: Optional[int] = None) -> list[BenchmarkRecord]:
    """Time lattice construction and both searches for each density and hierarchy depth.

    ``naive_max_nodes`` skips the quadratic search above that size (recorded as NaN).
    """
    if not densities or not k_levels:
        raise ValueError("density and K sweeps must be non-empty")
    if repetitions < 1:
        raise ValueError("repetitions must be positive")
    base = ccfg or CostConfig()
    full = dataclasses.replace(base, hierarchy=HIERARCHIES[3])
    worlds = [benchmark_world(d, seed) for d in densities]
    builders = [lambda w=w: generate_graph(*w, full) for w in worlds]
    construction = _median_times(builders, repetitions)

    records = []
    for density, build, t_build in zip(densities, builders, construction):
        g = build()
        jobs, slots = [], []
        for k in k_levels:
            cfg = dataclasses.replace(base, hierarchy=HIERARCHIES[k])
            gk = g.with_levels(cfg.level_indices)
            eps = cfg.tie_epsilon
            if naive_max_nodes is None or gk.n_nodes <= naive_max_nodes:
                jobs.append(lambda gk=gk, eps=eps: lex_search_naive(gk, gk.init_node, eps))
                slots.append((k, "naive"))
            jobs.append(lambda gk=gk, eps=eps: lex_search_heap(gk, gk.init_node, eps))
            slots.append((k, "heap"))
        timed = dict(zip(slots, _median_times(jobs, repetitions)))
        for k in k_levels:
            records.append(BenchmarkRecord(density, g.n_nodes, g.n_edges, k, t_build,
                                           timed.get((k, "naive"), math.nan), timed[(k, "heap")],
                                           repetitions))
    return records


def linear_fit_r2(x: Sequence[float], y: Sequence[float]) -> tuple[float, float, float]:
    """Least-squares line y = a x + b; returns (a, b, R^2)."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    a, b = np.polyfit(x, y, 1)
    resid = y - (a * x + b)
    ss_tot = float(((y - y.mean()) ** 2).sum())
    r2 = 1.0 - float((resid ** 2).sum()) / ss_tot if ss_tot > 0 else 1.0
    return float(a), float(b), r2


def scaled_fit_r2(x: Sequence[float], y: Sequence[float]) -> tuple[float, float]:
    """Fit y = c * x through the origin; returns (c, R^2)."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    c = float((x @ y) / (x @ x))
    ss_tot = float(((y - y.mean()) ** 2).sum())
    r2 = 1.0 - float(((y - c * x) ** 2).sum()) / ss_tot if ss_tot > 0 else 1.0
    return c, r2
