"""Receding-horizon planner: keep following the active path until it is blocked
(or grows markedly riskier), then rebuild the lattice ahead and search it."""
from __future__ import annotations

import hashlib
import math
import time
from dataclasses import dataclass, field
from functools import cached_property
from typing import Optional, Union

import numpy as np

from .costs import CostConfig, CostVector
from .errors import CollisionError, GraphGenerationError
from .geometry import ObstacleSet, Pose2D, ReferencePath, project_points
from .graph import GraphConfig, PlanGraph, generate_graph
from .search import extract_path, lex_search_heap, lex_search_naive


@dataclass(frozen=True)
class PlannerConfig:
    goal_tolerance: float = 0.3
    risk_trigger: bool = True
    risk_increase_fraction: float = 0.2
    risk_increase_floor: float = 0.05
    search: str = "heap"
    early_exit: bool = False

    def __post_init__(self) -> None:
        if self.goal_tolerance <= 0.0:
            raise ValueError("goal_tolerance must be positive")
        if self.risk_increase_fraction < 0.0 or self.risk_increase_floor < 0.0:
            raise ValueError("risk trigger thresholds must be non-negative")
        if self.search not in ("heap", "naive"):
            raise ValueError("search must be 'heap' or 'naive'")


@dataclass(frozen=True, eq=False)
class ActivePath:
    """The path being executed: lattice part up to ``split_index``, then the reference tail."""

    waypoints: tuple[Pose2D, ...]
    split_index: int
    cost: Optional[CostVector] = None

    def __post_init__(self) -> None:
        if not self.waypoints:
            raise ValueError("active path needs at least one waypoint")
        if not (0 <= self.split_index < len(self.waypoints)):
            raise ValueError("split_index out of range")

    @classmethod
    def from_reference(cls, ref: ReferencePath) -> "ActivePath":
        return cls(_poses_along(ref.vertices), 0, None)

    @cached_property
    def points(self) -> np.ndarray:
        return np.array([w.xy for w in self.waypoints])

    @cached_property
    def polyline(self) -> ReferencePath:
        return ReferencePath.from_points(self.points, dedupe=True)

    @property
    def goal(self) -> Pose2D:
        return self.waypoints[-1]

    @property
    def lattice_points(self) -> np.ndarray:
        return self.points[: self.split_index + 1]


@dataclass(frozen=True)
class FollowPath:
    path: ActivePath
    kind: str = "follow"


@dataclass(frozen=True)
class HoldPosition:
    pose: Pose2D
    kind: str = "hold"


@dataclass(frozen=True)
class GoalReached:
    kind: str = "goal"


PlannerOutput = Union[FollowPath, HoldPosition, GoalReached]


@dataclass
class ReplanRecord:
    tick: int
    reason: str
    success: bool
    node_count: int = 0
    edge_count: int = 0
    path_cost: Optional[CostVector] = None
    cached: bool = False
    construction_seconds: float = 0.0
    search_seconds: float = 0.0


def _poses_along(points: np.ndarray) -> tuple[Pose2D, ...]:
    pts = np.asarray(points, dtype=float)
    if len(pts) == 1:
        return (Pose2D(pts[0, 0], pts[0, 1], 0.0),)
    d = np.diff(pts, axis=0)
    hd = np.arctan2(d[:, 1], d[:, 0])
    hd = np.append(hd, hd[-1])
    return tuple(Pose2D(x, y, h) for (x, y), h in zip(pts, hd))


def _window(path: ReferencePath, s_from: float, length: float) -> np.ndarray:
    """Polyline covering arc lengths [s_from, s_from + length] of ``path``."""
    s_to = min(s_from + length, path.length)
    s_from = min(max(s_from, 0.0), path.length)
    inner = path.vertices[(path.cumulative_arclength > s_from) & (path.cumulative_arclength < s_to)]
    ends, _ = path.sample(np.array([s_from, s_to]))
    return np.vstack((ends[:1], inner, ends[1:]))


def path_blocked(sigma: ActivePath, obstacles: ObstacleSet, gcfg: GraphConfig, from_pose: Pose2D,
                 from_arclength: Optional[float] = None) -> bool:
    """Whether the next ``d_sensor`` metres of ``sigma`` come within the inflation radius.

    Distances are exact point-to-segment distances, so no sub-sample gap is missed.
    """
    if not obstacles:
        return False
    poly = sigma.polyline
    if from_arclength is None:
        _, s, _, _ = project_points(np.array([from_pose.xy]), poly)
        from_arclength = float(s[0])
    pts = _window(poly, from_arclength, gcfg.d_sensor)
    if len(pts) < 2:
        return False
    clear = obstacles.segments_clear(pts[:-1], pts[1:], gcfg.inflation_radius)
    return not bool(np.all(clear))


def _obstacle_digest(obstacles: ObstacleSet) -> str:
    return hashlib.sha1(np.ascontiguousarray(obstacles.points).tobytes()).hexdigest()


class RecedingHorizonPlanner:
    """Stateful wrapper around graph generation and lexicographic search.

    One instance owns its active path; do not share it across threads.
    """

    def __init__(self, reference: ReferencePath, gcfg: GraphConfig, ccfg: CostConfig,
                 pcfg: Optional[PlannerConfig] = None):
        self.reference = reference
        self.gcfg = gcfg
        self.ccfg = ccfg
        self.pcfg = pcfg or PlannerConfig()
        self.active = ActivePath.from_reference(reference)
        self.progress = 0.0
        self.sigma_progress = 0.0
        self.holding = False
        self.replans: list[ReplanRecord] = []
        self.last_graph: Optional[PlanGraph] = None
        self.last_replan_input: Optional[tuple[Pose2D, ObstacleSet, ReferencePath]] = None
        self._tick = 0
        self._failed_key: Optional[tuple] = None
        self._emitted_risk = self._risk_profile(self.active, ObstacleSet())

    @property
    def replan_count(self) -> int:
        """Lattice rebuilds actually performed (cached hold retries excluded)."""
        return sum(1 for r in self.replans if not r.cached)

    # -- helpers ---------------------------------------------------------

    def _risk_samples(self, path: ActivePath) -> tuple[np.ndarray, np.ndarray, float]:
        poly = path.polyline
        h = self.ccfg.integration_step
        n = max(int(math.ceil(poly.length / h - 1e-9)), 1)
        ds = poly.length / n
        s = (np.arange(n) + 0.5) * ds
        pts, _ = poly.sample(s)
        return s, pts, ds

    def _risk_profile(self, path: ActivePath, obstacles: ObstacleSet) -> np.ndarray:
        s, pts, ds = self._risk_samples(path)
        if not obstacles or math.isinf(self.ccfg.th_risk):
            return np.zeros(len(s))
        d = obstacles.nearest_distances(pts)
        with np.errstate(divide="ignore"):
            r = 1.0 / d
        return np.where(r > self.ccfg.th_risk, r, 0.0) * ds

    def _riskier(self, obstacles: ObstacleSet) -> bool:
        if not obstacles:
            return False
        s, _, _ = self._risk_samples(self.active)
        ahead = s >= self.sigma_progress
        before = float(self._emitted_risk[ahead].sum())
        now = float(self._risk_profile(self.active, obstacles)[ahead].sum())
        if math.isinf(now):
            return not math.isinf(before)
        return now > before * (1.0 + self.pcfg.risk_increase_fraction) and now - before > self.pcfg.risk_increase_floor

    def _update_progress(self, x_c: Pose2D) -> None:
        if self.progress < self.reference.length - 1e-6:
            rest = self.reference.slice_from(self.progress)
            _, s, _, _ = project_points(np.array([x_c.xy]), rest)
            self.progress = min(self.progress + float(s[0]), self.reference.length)
        poly = self.active.polyline
        if self.sigma_progress < poly.length - 1e-6:
            rest = poly.slice_from(self.sigma_progress)
            _, s, _, _ = project_points(np.array([x_c.xy]), rest)
            self.sigma_progress = min(self.sigma_progress + float(s[0]), poly.length)

    def _adopt(self, path: ActivePath, obstacles: ObstacleSet) -> None:
        self.active = path
        self.sigma_progress = 0.0
        self._emitted_risk = self._risk_profile(path, obstacles)

    # -- main entry --------------------------------------------------------

    def plan_step(self, x_c: Pose2D, obstacles: ObstacleSet, tick: Optional[int] = None) -> PlannerOutput:
        self._tick = self._tick + 1 if tick is None else tick
        goal = self.reference.end
        if math.hypot(x_c.x - goal[0], x_c.y - goal[1]) <= self.pcfg.goal_tolerance:
            return GoalReached()
        if obstacles and obstacles.in_collision(np.array(x_c.xy), self.gcfg.inflation_radius)[0]:
            raise CollisionError(f"robot state ({x_c.x:.3f}, {x_c.y:.3f}) is inside an inflated obstacle")
        self._update_progress(x_c)

        if self.holding:
            reason = "hold-retry"
        elif path_blocked(self.active, obstacles, self.gcfg, x_c, self.sigma_progress):
            reason = "blocked"
        elif self.pcfg.risk_trigger and self._riskier(obstacles):
            reason = "risk"
        else:
            return FollowPath(self.active)
        return self._replan(x_c, obstacles, reason)

    def _replan(self, x_c: Pose2D, obstacles: ObstacleSet, reason: str) -> PlannerOutput:
        key = (x_c.x, x_c.y, self.progress, _obstacle_digest(obstacles))
        if self.holding and key == self._failed_key:
            self.replans.append(ReplanRecord(self._tick, reason, False, cached=True))
            return HoldPosition(x_c)

        record = ReplanRecord(self._tick, reason, False)
        self.replans.append(record)
        if self.progress >= self.reference.length - 1e-9:
            # off the end of the reference but outside the goal tolerance
            path = None
        else:
            ref = self.reference.slice_from(self.progress)
            self.last_replan_input = (x_c, obstacles, ref)
            path = self.replan_path(x_c, obstacles, ref, record)
        if path is None and reason == "risk":
            # the current path is still clear; keep it and accept its risk as the new baseline
            self._emitted_risk = self._risk_profile(self.active, obstacles)
            return FollowPath(self.active)
        if path is None:
            self.holding = True
            self._failed_key = key
            return HoldPosition(x_c)
        self.holding = False
        self._failed_key = None
        self._adopt(path, obstacles)
        return FollowPath(path)

    def replan_path(self, x_c: Pose2D, obstacles: ObstacleSet, ref: ReferencePath,
                    record: Optional[ReplanRecord] = None, ccfg: Optional[CostConfig] = None) -> Optional[ActivePath]:
        """Build the lattice from ``x_c`` and return the spliced path, or None on failure."""
        ccfg = ccfg or self.ccfg
        record = record if record is not None else ReplanRecord(self._tick, "manual", False)
        t0 = time.perf_counter()
        try:
            g = generate_graph(ref, x_c, obstacles, self.gcfg, ccfg)
        except GraphGenerationError:
            record.construction_seconds = time.perf_counter() - t0
            return None
        t1 = time.perf_counter()
        record.construction_seconds = t1 - t0
        record.node_count, record.edge_count = g.n_nodes, g.n_edges
        self.last_graph = g
        init = linkable_init(x_c, g, obstacles, self.gcfg.inflation_radius)
        if init is None:
            record.search_seconds = time.perf_counter() - t1
            return None
        search = lex_search_heap if self.pcfg.search == "heap" else lex_search_naive
        result = search(g, init, ccfg.tie_epsilon, goal=g.goal_node if self.pcfg.early_exit else None)
        record.search_seconds = time.perf_counter() - t1
        nodes = extract_path(result, g.goal_node)
        if nodes is None:
            return None
        path = splice_path(x_c, g, nodes, ref, result.cost[g.goal_node])
        record.success = True
        record.path_cost = path.cost
        return path


def linkable_init(x_c: Pose2D, g: PlanGraph, obstacles: ObstacleSet, radius: float) -> Optional[int]:
    """The graph's init node, or failing that the nearest node reachable from x_c in a straight line.

    Near sharp corners of the reference the nearest node can sit behind an
    obstacle; the robot then enters the lattice at the next closest node.
    """
    if not obstacles:
        return g.init_node
    start = np.array([x_c.xy])
    if obstacles.segments_clear(start, g.positions[g.init_node][None, :], radius)[0]:
        return g.init_node
    d2 = ((g.positions - start) ** 2).sum(axis=1)
    order = np.argsort(d2, kind="stable")
    clear = obstacles.segments_clear(np.repeat(start, len(order), axis=0), g.positions[order], radius)
    hits = order[clear]
    return int(hits[0]) if hits.size else None


def splice_path(x_c: Pose2D, g: PlanGraph, nodes: list[int], ref: ReferencePath,
                cost: Optional[CostVector]) -> ActivePath:
    """Concatenate x_c, the lattice nodes and the reference beyond the roll-in node."""
    lattice = g.positions[nodes]
    s_goal = float(g.station_arclength[-1])
    tail = ref.vertices[ref.cumulative_arclength > s_goal + 1e-9]
    pts = np.vstack((np.array([x_c.xy]), lattice, tail))
    keep = np.ones(len(pts), dtype=bool)
    keep[1:] = np.hypot(*np.diff(pts, axis=0).T) > 1e-9
    split = int(np.count_nonzero(keep[: 1 + len(lattice)])) - 1
    pts = pts[keep]
    return ActivePath(_poses_along(pts), split, cost)
