"""Deterministic 2-D world closing the loop around the receding-horizon planner."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .costs import CostConfig, edge_costs_batch
from .errors import CollisionError
from .geometry import ObstacleSet, Pose2D, ReferencePath, project_points
from .graph import GraphConfig
from .planner import (
    ActivePath,
    FollowPath,
    GoalReached,
    HoldPosition,
    PlannerConfig,
    PlannerOutput,
    RecedingHorizonPlanner,
    ReplanRecord,
)


@dataclass(frozen=True, eq=False)
class ObstacleCluster:
    """Rigid point cluster, optionally translated along a timed schedule.

    ``motion`` rows are ``(t, dx, dy)``: the offset applied to ``points`` at time
    ``t``. Offsets are linearly interpolated and held constant outside the
    schedule. ``None`` means static.
    """

    points: np.ndarray
    motion: Optional[np.ndarray] = None
    name: str = ""

    def __post_init__(self) -> None:
        pts = np.array(self.points, dtype=float).reshape(-1, 2)
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)
        if self.motion is not None:
            m = np.array(self.motion, dtype=float).reshape(-1, 3)
            if len(m) == 0:
                m = None
            elif np.any(np.diff(m[:, 0]) <= 0.0):
                raise ValueError("motion schedule times must be strictly increasing")
            else:
                m.setflags(write=False)
            object.__setattr__(self, "motion", m)

    @property
    def is_static(self) -> bool:
        return self.motion is None

    def offset_at(self, t: float) -> tuple[float, float]:
        if self.motion is None:
            return (0.0, 0.0)
        m = self.motion
        return (float(np.interp(t, m[:, 0], m[:, 1])), float(np.interp(t, m[:, 0], m[:, 2])))

    def points_at(self, t: float) -> np.ndarray:
        dx, dy = self.offset_at(t)
        if dx == 0.0 and dy == 0.0:
            return self.points
        return self.points + np.array([dx, dy])


@dataclass(frozen=True)
class SimConfig:
    tick_dt: float = 0.1
    robot_speed: float = 1.0
    max_ticks: int = 1000
    seed: int = 0

    def __post_init__(self) -> None:
        if not (self.tick_dt > 0.0):
            raise ValueError("tick_dt must be positive")
        if not (self.robot_speed > 0.0):
            raise ValueError("robot_speed must be positive")
        if int(self.max_ticks) <= 0:
            raise ValueError("max_ticks must be positive")


@dataclass(eq=False)
class Scenario:
    name: str
    reference_path: ReferencePath
    robot_start: Pose2D
    obstacles: list[ObstacleCluster]
    graph_config: GraphConfig = field(default_factory=GraphConfig)
    cost_config: CostConfig = field(default_factory=CostConfig)
    planner_config: PlannerConfig = field(default_factory=PlannerConfig)
    sim: SimConfig = field(default_factory=SimConfig)
    description: str = ""

    def obstacle_points_at(self, t: float) -> np.ndarray:
        parts = [c.points_at(t) for c in self.obstacles]
        return np.vstack(parts) if parts else np.empty((0, 2))

    def validate(self) -> None:
        pts = self.obstacle_points_at(0.0)
        if len(pts):
            d = np.hypot(*(pts - np.array(self.robot_start.xy)).T).min()
            if d < self.graph_config.inflation_radius:
                raise CollisionError("robot_start lies inside an inflated obstacle")


def sense(true_points: np.ndarray, robot: Pose2D, d_sensor: float,
          memory: Optional[np.ndarray] = None) -> tuple[ObstacleSet, np.ndarray]:
    """Ideal 360 degree range sensor with memory of points seen earlier.

    Returns the obstacle set and the updated memory. Remembered points inside
    the sensor disk are dropped; what is observed there replaces them.
    """
    here = np.array(robot.xy)
    pts = np.asarray(true_points, dtype=float).reshape(-1, 2)
    visible = pts[np.hypot(*(pts - here).T) <= d_sensor] if len(pts) else pts
    if memory is None or len(memory) == 0:
        kept = np.empty((0, 2))
    else:
        kept = memory[np.hypot(*(memory - here).T) > d_sensor]
    merged = np.vstack((kept, visible))
    return ObstacleSet(merged), merged


@dataclass
class TickRecord:
    tick: int
    pose: Pose2D
    kind: str


@dataclass
class RunMetrics:
    scenario: str
    replan_count: int = 0
    goal_reached: bool = False
    ticks_elapsed: int = 0
    trace: list[TickRecord] = field(default_factory=list)
    accumulated_costs: tuple[float, float, float] = (0.0, 0.0, 0.0)
    replans: list[ReplanRecord] = field(default_factory=list)
    hold_intervals: list[tuple[int, int]] = field(default_factory=list)
    emitted_paths: list[tuple[int, np.ndarray]] = field(default_factory=list)
    collided: bool = False
    error: Optional[str] = None
    min_clearance: float = math.inf

    @property
    def executed_path(self) -> list[Pose2D]:
        return [r.pose for r in self.trace]

    def to_dict(self, include_timing: bool = False) -> dict:
        replans = []
        for r in self.replans:
            row = {
                "tick": r.tick,
                "reason": r.reason,
                "success": r.success,
                "cached": r.cached,
                "node_count": r.node_count,
                "edge_count": r.edge_count,
                "path_cost": list(r.path_cost) if r.path_cost is not None else None,
            }
            if include_timing:
                row["construction_seconds"] = r.construction_seconds
                row["search_seconds"] = r.search_seconds
            replans.append(row)
        return {
            "schema_version": 1,
            "scenario": self.scenario,
            "goal_reached": self.goal_reached,
            "replan_count": self.replan_count,
            "ticks_elapsed": self.ticks_elapsed,
            "collided": self.collided,
            "error": self.error,
            "min_clearance": self.min_clearance if math.isfinite(self.min_clearance) else None,
            "accumulated_costs": {
                "risk": self.accumulated_costs[0],
                "heading": self.accumulated_costs[1],
                "distance": self.accumulated_costs[2],
            },
            "hold_intervals": [list(h) for h in self.hold_intervals],
            "replans": replans,
            "executed_path": [[p.x, p.y, p.heading] for p in self.executed_path],
        }


class World:
    """Mutable simulation state for one scenario run."""

    def __init__(self, scenario: Scenario):
        scenario.validate()
        self.scenario = scenario
        self.time = 0.0
        self.tick = 0
        self.robot = scenario.robot_start
        self.memory = np.empty((0, 2))
        self.planner = RecedingHorizonPlanner(scenario.reference_path, scenario.graph_config,
                                              scenario.cost_config, scenario.planner_config)
        self.tracked: Optional[ActivePath] = None
        self.path_s = 0.0
        self.last_output: Optional[PlannerOutput] = None
        self.sensed = ObstacleSet()

    def true_obstacles(self) -> np.ndarray:
        return self.scenario.obstacle_points_at(self.time)

    def step(self) -> PlannerOutput:
        """Advance obstacles, sense, plan, then move the robot one tick."""
        sc = self.scenario
        self.tick += 1
        self.time = self.tick * sc.sim.tick_dt
        truth = self.true_obstacles()
        self.sensed, self.memory = sense(truth, self.robot, sc.graph_config.d_sensor, self.memory)
        out = self.planner.plan_step(self.robot, self.sensed, self.tick)
        if isinstance(out, FollowPath):
            self._advance(out.path)
        self.last_output = out
        return out

    def _advance(self, path: ActivePath) -> None:
        poly = path.polyline
        if path is not self.tracked:
            self.tracked = path
            _, s, _, _ = project_points(np.array([self.robot.xy]), poly)
            self.path_s = float(s[0])
        self.path_s = min(self.path_s + self.scenario.sim.robot_speed * self.scenario.sim.tick_dt, poly.length)
        self.robot = poly.pose_at(self.path_s)


def run_scenario(scenario: Scenario) -> RunMetrics:
    """Step until the goal is reached, the tick budget runs out or a collision occurs."""
    world = World(scenario)
    metrics = RunMetrics(scenario=scenario.name)
    r = scenario.graph_config.inflation_radius
    metrics.trace.append(TickRecord(0, world.robot, "start"))
    truth0 = world.true_obstacles()
    obstacles_per_tick = [truth0]
    metrics.min_clearance = _clearance(world.robot, truth0)
    hold_start = None
    last_path = None

    while world.tick < scenario.sim.max_ticks:
        try:
            out = world.step()
        except CollisionError as exc:
            metrics.error = str(exc)
            metrics.collided = True
            break
        truth = world.true_obstacles()
        obstacles_per_tick.append(truth)
        metrics.trace.append(TickRecord(world.tick, world.robot, out.kind))
        clearance = _clearance(world.robot, truth)
        metrics.min_clearance = min(metrics.min_clearance, clearance)
        if isinstance(out, FollowPath) and out.path is not last_path:
            last_path = out.path
            metrics.emitted_paths.append((world.tick, out.path.points))
        if isinstance(out, HoldPosition):
            if hold_start is None:
                hold_start = world.tick
        elif hold_start is not None:
            metrics.hold_intervals.append((hold_start, world.tick - 1))
            hold_start = None
        if clearance < r:
            metrics.collided = True
            metrics.error = f"robot entered an inflated obstacle at tick {world.tick}"
            break
        if isinstance(out, GoalReached):
            metrics.goal_reached = True
            break
    if hold_start is not None:
        metrics.hold_intervals.append((hold_start, world.tick))

    metrics.ticks_elapsed = world.tick
    metrics.replans = list(world.planner.replans)
    metrics.replan_count = world.planner.replan_count
    metrics.accumulated_costs = trace_costs(metrics.executed_path, obstacles_per_tick, scenario.reference_path,
                                            scenario.cost_config)
    return metrics


def _clearance(pose: Pose2D, pts: np.ndarray) -> float:
    if len(pts) == 0:
        return math.inf
    return float(np.hypot(*(pts - np.array(pose.xy)).T).min())


def trace_costs(trace: Sequence[Pose2D], obstacles_per_tick: Sequence[np.ndarray], ref: ReferencePath,
                ccfg: CostConfig) -> tuple[float, float, float]:
    """Canonical costs of the executed trace, each step costed against that tick's obstacles."""
    total = np.zeros(3)
    for prev, cur, pts in zip(trace, trace[1:], obstacles_per_tick[1:]):
        if math.hypot(cur.x - prev.x, cur.y - prev.y) <= 1e-12:
            continue
        c = edge_costs_batch(np.array([prev.xy]), np.array([cur.xy]), ObstacleSet(pts), ref, ccfg)[0]
        total += c
    return (float(total[0]), float(total[1]), float(total[2]))
