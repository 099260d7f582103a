"""Roll-out / roll-in lattice generation around a reference path."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .costs import CostConfig, CostVector, edge_costs_batch
from .errors import CollisionError, GraphGenerationError
from .geometry import ObstacleSet, Pose2D, ReferencePath, angular_difference_array, project_onto_path

FORWARD5 = "forward5"
FULL8 = "full8"

_FORWARD_OFFSETS = ((1, -1), (1, 0), (1, 1), (0, -1), (0, 1))
_BACKWARD_OFFSETS = ((-1, -1), (-1, 0), (-1, 1))


@dataclass(frozen=True)
class GraphConfig:
    d_span: float = 1.0
    d_roll: float = 7.0
    d_sensor: float = 5.0
    station_step: float = 0.5
    lateral_step: float = 0.25
    rollout_length: float = 2.0
    rollin_length: float = 2.0
    inflation_radius: float = 0.3
    connectivity: str = FORWARD5
    max_heading_change: float = math.pi / 2

    def __post_init__(self) -> None:
        object.__setattr__(self, "connectivity", str(self.connectivity).lower())
        for name in ("d_span", "d_roll", "d_sensor", "station_step", "lateral_step",
                     "rollout_length", "rollin_length"):
            if not (getattr(self, name) > 0.0):
                raise ValueError(f"{name} must be positive")
        if not (self.inflation_radius >= 0.0):
            raise ValueError("inflation_radius must be non-negative")
        if not (self.d_roll > self.d_sensor):
            raise ValueError("d_roll must exceed d_sensor")
        if self.rollout_length + self.rollin_length > self.d_roll + 1e-12:
            raise ValueError("rollout_length + rollin_length must not exceed d_roll")
        if self.lateral_step > self.d_span:
            raise ValueError("lateral_step must not exceed d_span")
        if self.connectivity not in (FORWARD5, FULL8):
            raise ValueError(f"connectivity must be {FORWARD5!r} or {FULL8!r}")
        if not (0.0 < self.max_heading_change <= math.pi):
            raise ValueError("max_heading_change must lie in (0, pi]")


@dataclass(eq=False)
class PlanGraph:
    """Directed lattice with per-edge cost vectors.

    ``edge_full_costs`` holds canonical (risk, heading, distance) costs; the
    ``adjacency`` lists carry them projected onto ``levels``.
    """

    station_index: np.ndarray
    lateral_index: np.ndarray
    positions: np.ndarray
    headings: np.ndarray
    edge_src: np.ndarray
    edge_dst: np.ndarray
    edge_full_costs: np.ndarray
    levels: tuple[int, ...]
    init_node: int
    goal_node: int
    station_arclength: np.ndarray = field(default_factory=lambda: np.empty(0))
    adjacency: list = field(init=False, repr=False)
    _edge_lookup: dict = field(init=False, repr=False)

    def __post_init__(self) -> None:
        self.adjacency = self._build_adjacency(self.levels)
        self._edge_lookup = {(int(u), int(v)): e for e, (u, v) in enumerate(zip(self.edge_src, self.edge_dst))}

    def _build_adjacency(self, levels: Sequence[int]) -> list:
        adj: list = [[] for _ in range(self.n_nodes)]
        proj = self.edge_full_costs[:, list(levels)].tolist()
        for u, v, c in zip(self.edge_src.tolist(), self.edge_dst.tolist(), proj):
            adj[u].append((v, tuple(c)))
        return adj

    def with_levels(self, levels: Sequence[int]) -> "PlanGraph":
        """Same lattice, searched under a different cost hierarchy."""
        return PlanGraph(self.station_index, self.lateral_index, self.positions, self.headings,
                         self.edge_src, self.edge_dst, self.edge_full_costs, tuple(levels),
                         self.init_node, self.goal_node, self.station_arclength)

    @property
    def k(self) -> int:
        return len(self.levels)

    @property
    def n_nodes(self) -> int:
        return len(self.positions)

    @property
    def n_edges(self) -> int:
        return len(self.edge_src)

    def pose(self, node: int) -> Pose2D:
        return Pose2D(self.positions[node, 0], self.positions[node, 1], self.headings[node])

    def node_key(self, node: int) -> tuple[int, int]:
        return int(self.station_index[node]), int(self.lateral_index[node])

    def find_node(self, station: int, lateral: int) -> Optional[int]:
        hit = np.flatnonzero((self.station_index == station) & (self.lateral_index == lateral))
        return int(hit[0]) if hit.size else None

    def full_path_cost(self, path: Sequence[int]) -> tuple[float, float, float]:
        """Canonical (risk, heading, distance) cost of a node path, in travel order."""
        total = [0.0, 0.0, 0.0]
        for u, v in zip(path, path[1:]):
            c = self.edge_full_costs[self._edge_lookup[(u, v)]]
            total = [t + float(x) for t, x in zip(total, c)]
        return tuple(total)


def station_spans(n_stations: int, extent: float, lat0: float, gcfg: GraphConfig) -> tuple[np.ndarray, np.ndarray]:
    """Longitudinal offsets and half-widths of stations 1..n_stations."""
    t = np.minimum(np.arange(1, n_stations + 1) * gcfg.station_step, extent)
    lat0 = abs(lat0)
    out_frac = np.minimum(t / gcfg.rollout_length, 1.0)
    roll_out = lat0 + (gcfg.d_span - lat0) * 0.5 * (1.0 - np.cos(np.pi * out_frac))
    in_frac = np.minimum(np.maximum(extent - t, 0.0) / gcfg.rollin_length, 1.0)
    roll_in = gcfg.d_span * 0.5 * (1.0 - np.cos(np.pi * in_frac))
    return t, np.minimum(roll_out, roll_in)


def _layout(ref: ReferencePath, s0: float, lat0: float, extent: float, obstacles: ObstacleSet,
            gcfg: GraphConfig):
    """Collision-free lattice nodes for one horizon, or None if the roll-in target is occupied."""
    n_stations = max(int(math.ceil(extent / gcfg.station_step - 1e-9)), 1)
    t, spans = station_spans(n_stations, extent, lat0, gcfg)
    half = np.floor(spans / gcfg.lateral_step + 1e-9).astype(int)
    s_station = s0 + t
    base, hd = ref.sample(s_station)
    counts = 2 * half + 1
    st = np.repeat(np.arange(1, n_stations + 1), counts)
    lat = np.concatenate([np.arange(-h, h + 1) for h in half])
    sid = st - 1
    normal = np.column_stack((-np.sin(hd), np.cos(hd)))
    pos = base[sid] + (lat * gcfg.lateral_step)[:, None] * normal[sid]
    heading = hd[sid]

    keep = ~obstacles.in_collision(pos, gcfg.inflation_radius) if obstacles else np.ones(len(pos), dtype=bool)
    st, lat, pos, heading = st[keep], lat[keep], pos[keep], heading[keep]
    goal_hits = np.flatnonzero((st == n_stations) & (lat == 0))
    if goal_hits.size == 0:
        return None
    return n_stations, half, s_station, st, lat, pos, heading, int(goal_hits[0])


def generate_graph(ref: ReferencePath, x_c: Pose2D, obstacles: ObstacleSet,
                   gcfg: GraphConfig, ccfg: CostConfig) -> PlanGraph:
    """Sample the lattice ahead of ``x_c``, prune collisions and cost every edge."""
    r = gcfg.inflation_radius
    if obstacles and obstacles.in_collision(np.array(x_c.xy), r)[0]:
        raise CollisionError(f"robot state ({x_c.x:.3f}, {x_c.y:.3f}) is inside an inflated obstacle")

    proj = project_onto_path(x_c.xy, ref)
    s0 = proj.arclength
    extent = min(gcfg.d_roll, ref.length - s0)
    if extent <= 1e-9:
        raise GraphGenerationError("no reference path left ahead of the robot")
    # an occupied roll-in target pulls the horizon back one station at a time
    while True:
        layout = _layout(ref, s0, proj.lateral_offset, extent, obstacles, gcfg)
        if layout is not None:
            break
        extent -= gcfg.station_step
        if extent <= 1e-9:
            raise GraphGenerationError("every roll-in target on the reference path is occupied")
    n_stations, half, s_station, st, lat, pos, heading, goal = layout
    n = len(pos)

    jmax = int(half.max())
    grid = np.full((n_stations + 2, 2 * jmax + 3), -1, dtype=np.int64)
    grid[st, lat + jmax + 1] = np.arange(n)

    offsets = _FORWARD_OFFSETS + (_BACKWARD_OFFSETS if gcfg.connectivity == FULL8 else ())
    src_parts, dst_parts, back_parts = [], [], []
    ids = np.arange(n)
    for di, dj in offsets:
        ti = st + di
        tj = lat + dj + jmax + 1
        ok = (ti >= 1) & (ti <= n_stations) & (tj >= 0) & (tj < grid.shape[1])
        tgt = np.full(n, -1, dtype=np.int64)
        tgt[ok] = grid[ti[ok], tj[ok]]
        has = tgt >= 0
        src_parts.append(ids[has])
        dst_parts.append(tgt[has])
        back_parts.append(np.full(int(has.sum()), di < 0))
    src = np.concatenate(src_parts)
    dst = np.concatenate(dst_parts)
    backward = np.concatenate(back_parts)
    # stable order: by source node, then offset order
    order = np.argsort(src, kind="stable")
    src, dst, backward = src[order], dst[order], backward[order]

    vec = pos[dst] - pos[src]
    length = np.hypot(vec[:, 0], vec[:, 1])
    ok = length > 1e-9
    direction = np.arctan2(vec[:, 1], vec[:, 0])
    turn = angular_difference_array(direction, heading[src])
    ok &= backward | (turn <= gcfg.max_heading_change + 1e-9)
    src, dst = src[ok], dst[ok]
    if obstacles and len(src):
        clear = obstacles.segments_clear(pos[src], pos[dst], r)
        src, dst = src[clear], dst[clear]

    costs = edge_costs_batch(pos[src], pos[dst], obstacles, ref, ccfg) if len(src) else np.empty((0, 3))

    g = PlanGraph(
        station_index=st, lateral_index=lat, positions=pos, headings=heading,
        edge_src=src, edge_dst=dst, edge_full_costs=costs, levels=ccfg.level_indices,
        init_node=0, goal_node=goal, station_arclength=s_station,
    )
    g.init_node = nearest_node(g, x_c)
    return g


def nearest_node(g: PlanGraph, p: Pose2D) -> int:
    """Node closest to ``p``; the lowest id wins ties."""
    if g.n_nodes == 0:
        raise ValueError("empty graph")
    d2 = (g.positions[:, 0] - p.x) ** 2 + (g.positions[:, 1] - p.y) ** 2
    return int(np.argmin(d2))


def reachable_nodes(g, init: int) -> set[int]:
    """Plain breadth-first reachability, independent of costs."""
    seen = {init}
    frontier = [init]
    while frontier:
        nxt = []
        for u in frontier:
            for v, _ in g.adjacency[u]:
                if v not in seen:
                    seen.add(v)
                    nxt.append(v)
        frontier = nxt
    return seen
