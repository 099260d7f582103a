"""Builders for the bundled scenarios and seeded random scenarios.

The JSON files under ``lexplan/bundled`` are generated from these builders
(``python -m lexplan.scenarios``); the builders are the source of truth.
"""
from __future__ import annotations

import math
import sys
from pathlib import Path

import numpy as np

from .costs import CostConfig
from .geometry import Pose2D, ReferencePath
from .graph import GraphConfig
from .planner import PlannerConfig
from .sim import ObstacleCluster, Scenario, SimConfig


def disc(cx: float, cy: float, radius: float, spacing: float = 0.05) -> np.ndarray:
    """Points on the boundary of a disc (what a range sensor returns)."""
    n = max(int(math.ceil(2 * math.pi * radius / spacing)), 6)
    a = np.arange(n) * (2 * math.pi / n)
    return np.column_stack((cx + radius * np.cos(a), cy + radius * np.sin(a)))


def box(cx: float, cy: float, width: float, height: float, spacing: float = 0.05) -> np.ndarray:
    """Points along the outline of an axis-aligned rectangle."""
    x0, x1 = cx - width / 2, cx + width / 2
    y0, y1 = cy - height / 2, cy + height / 2
    nx = max(int(math.ceil(width / spacing)), 1)
    ny = max(int(math.ceil(height / spacing)), 1)
    xs = np.linspace(x0, x1, nx + 1)
    ys = np.linspace(y0, y1, ny + 1)
    parts = [
        np.column_stack((xs, np.full_like(xs, y0))),
        np.column_stack((np.full(ny - 1, x1), ys[1:-1])),
        np.column_stack((xs[::-1], np.full_like(xs, y1))),
        np.column_stack((np.full(ny - 1, x0), ys[-2:0:-1])),
    ]
    return np.vstack(parts)


def segment(x0: float, y0: float, x1: float, y1: float, spacing: float = 0.05) -> np.ndarray:
    n = max(int(math.ceil(math.hypot(x1 - x0, y1 - y0) / spacing)), 1)
    t = np.linspace(0.0, 1.0, n + 1)
    return np.column_stack((x0 + t * (x1 - x0), y0 + t * (y1 - y0)))


def empty_straight() -> Scenario:
    ref = ReferencePath.from_points([(0.0, 0.0), (20.0, 0.0)])
    return Scenario(
        "empty_straight", ref, Pose2D(0.0, 0.0, 0.0), [],
        sim=SimConfig(tick_dt=0.1, robot_speed=1.0, max_ticks=400, seed=0),
        description="Straight reference path, no obstacles.",
    )


def fig3_straight_blocked() -> Scenario:
    """Three obstacle clusters sitting on a straight reference path."""
    ref = ReferencePath.from_points([(0.0, 0.0), (30.0, 0.0)])
    clusters = [
        ObstacleCluster(disc(8.0, 0.1, 0.25), name="cluster-a"),
        ObstacleCluster(disc(15.0, -0.2, 0.3), name="cluster-b"),
        ObstacleCluster(np.vstack((disc(21.5, 0.5, 0.2), disc(22.5, -0.4, 0.2))), name="cluster-c"),
    ]
    return Scenario(
        "fig3_straight_blocked", ref, Pose2D(0.0, 0.0, 0.0), clusters,
        sim=SimConfig(tick_dt=0.1, robot_speed=1.0, max_ticks=600, seed=0),
        description="Obstacles on a straight reference force lattice detours.",
    )


def ushape_reference() -> ReferencePath:
    return ReferencePath.from_points([(0.0, 0.0), (12.0, 0.0), (12.0, 6.0), (0.0, 6.0)])


def fig4_ushape_static(seed: int = 7) -> Scenario:
    """U-shaped reference with seeded random static clusters around it."""
    ref = ushape_reference()
    rng = np.random.default_rng(seed)
    clusters = []
    s = 3.0
    while True:
        s += rng.uniform(2.6, 4.0)
        if s > ref.length - 3.0:
            break
        (p,), (h,) = ref.sample(s)
        lateral = rng.uniform(-0.7, 0.7)
        normal = np.array([-math.sin(h), math.cos(h)])
        c = p + lateral * normal
        radius = rng.uniform(0.15, 0.3)
        clusters.append(ObstacleCluster(disc(c[0], c[1], radius), name=f"rock-{len(clusters)}"))
    return Scenario(
        "fig4_ushape_static", ref, Pose2D(0.0, 0.0, 0.0), clusters,
        sim=SimConfig(tick_dt=0.1, robot_speed=1.0, max_ticks=800, seed=seed),
        description="U-shaped reference among randomly placed static obstacles.",
    )


def blocked_corridor() -> Scenario:
    ref = ReferencePath.from_points([(0.0, 0.0), (25.0, 0.0)])
    wall = ObstacleCluster(segment(12.0, -3.0, 12.0, 3.0), name="wall")
    return Scenario(
        "blocked_corridor", ref, Pose2D(0.0, 0.0, 0.0), [wall],
        sim=SimConfig(tick_dt=0.1, robot_speed=1.0, max_ticks=300, seed=0),
        description="A permanent wall across the whole corridor; the robot must hold.",
    )


POOL_W, POOL_H = 12.5, 6.5


def pool_walls(spacing: float = 0.1) -> np.ndarray:
    return np.vstack((
        segment(0.0, 0.0, POOL_W, 0.0, spacing),
        segment(POOL_W, 0.0, POOL_W, POOL_H, spacing)[1:],
        segment(POOL_W, POOL_H, 0.0, POOL_H, spacing)[1:],
        segment(0.0, POOL_H, 0.0, 0.0, spacing)[1:-1],
    ))


def _drift(rng: np.random.Generator, t0: float, t1: float, n: int, amp: float) -> list[list[float]]:
    """Seeded random-waypoint wander of at most ``amp`` metres, at rest outside [t0, t1]."""
    ts = np.linspace(t0, t1, n + 2)
    offs = rng.uniform(-amp, amp, size=(n + 2, 2))
    offs[0] = 0.0
    offs[-1] = 0.0
    return [[float(t), float(dx), float(dy)] for t, (dx, dy) in zip(ts, offs)]


def fig8_pool_dynamic(seed: int = 3) -> Scenario:
    """Swimming-pool analogue: U-shaped reference, walls, three floating containers.

    Container B drifts up into the top leg next to container C, closing the
    waterway for a while, then drifts back down into the pool.
    """
    rng = np.random.default_rng(seed)
    ref = ReferencePath.from_points([(11.0, 1.5), (11.0, 5.0), (1.5, 5.0), (1.5, 1.5)])
    walls = ObstacleCluster(pool_walls(), name="walls")
    a = ObstacleCluster(box(10.45, 3.0, 0.5, 0.5), np.array(_drift(rng, 20.0, 30.0, 3, 0.1)), name="container-a")
    b_motion = [[0.0, 0.0, 0.0], [6.0, 0.0, 2.0], [34.0, 0.0, 2.0], [42.0, 0.0, 0.0]]
    jitter = rng.uniform(-0.05, 0.05, size=2)
    b_motion[1][1] += float(jitter[0])
    b_motion[2][1] += float(jitter[0])
    b = ObstacleCluster(box(6.0 + float(jitter[1]), 1.9, 0.6, 1.3), np.array(b_motion), name="container-b")
    c = ObstacleCluster(box(6.0, 5.45, 0.6, 1.3), np.array(_drift(rng, 0.0, 6.0, 2, 0.05)), name="container-c")
    gcfg = GraphConfig(d_span=1.5, lateral_step=0.25, station_step=0.5)
    return Scenario(
        "fig8_pool_dynamic", ref, Pose2D(11.0, 1.5, math.pi / 2), [walls, a, b, c],
        graph_config=gcfg,
        sim=SimConfig(tick_dt=0.1, robot_speed=0.5, max_ticks=1200, seed=seed),
        description="12.5 x 6.5 m pool with walls and three moving containers; "
                    "two of them block the top leg for a while.",
    )


def random_scenario(seed: int) -> Scenario:
    """Straight or L-shaped reference with random static clusters (start kept clear)."""
    rng = np.random.default_rng(seed)
    length = rng.uniform(10.0, 16.0)
    if rng.random() < 0.5:
        pts = [(0.0, 0.0), (length, 0.0)]
    else:
        k = rng.uniform(0.4, 0.6) * length
        pts = [(0.0, 0.0), (k, 0.0), (k, length - k)]
    ref = ReferencePath.from_points(pts)
    clusters = []
    for i in range(int(rng.integers(2, 7))):
        s = rng.uniform(2.0, ref.length - 1.0)
        (p,), (h,) = ref.sample(s)
        lateral = rng.uniform(-1.5, 1.5)
        c = p + lateral * np.array([-math.sin(h), math.cos(h)])
        clusters.append(ObstacleCluster(disc(c[0], c[1], rng.uniform(0.1, 0.4)), name=f"rand-{i}"))
    return Scenario(
        f"random_{seed}", ref, Pose2D(0.0, 0.0, 0.0), clusters,
        sim=SimConfig(tick_dt=0.2, robot_speed=1.0, max_ticks=150, seed=seed),
        description="Seeded random static scenario.",
    )


BUILDERS = {
    "fig3_straight_blocked": fig3_straight_blocked,
    "fig4_ushape_static": fig4_ushape_static,
    "fig8_pool_dynamic": fig8_pool_dynamic,
    "blocked_corridor": blocked_corridor,
    "empty_straight": empty_straight,
}


def write_bundled(directory: Path) -> list[Path]:
    from .scenario_io import dump_scenario

    directory.mkdir(parents=True, exist_ok=True)
    written = []
    for name, build in BUILDERS.items():
        path = directory / f"{name}.json"
        dump_scenario(build(), path)
        written.append(path)
    return written


if __name__ == "__main__":
    target = Path(sys.argv[1]) if len(sys.argv) > 1 else Path(__file__).with_name("bundled")
    for p in write_bundled(target):
        print(p)
