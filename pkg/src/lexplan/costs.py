"""Risk / heading / distance costs and lexicographic comparison of cost vectors.

A cost vector is a plain tuple of non-negative floats, highest priority first.
Edge costs are always computed for the full canonical hierarchy
``(risk, heading, distance)``; :func:`select_levels` projects them onto the
hierarchy a planner is configured with.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import CollisionError, InvalidGraphError
from .geometry import ObstacleSet, ReferencePath, angular_difference, angular_difference_array, project_points

CostVector = tuple[float, ...]

LEVELS = ("risk", "heading", "distance")
LEVEL_INDEX = {name: i for i, name in enumerate(LEVELS)}

LESS, EQUAL, GREATER = -1, 0, 1


@dataclass(frozen=True)
class CostConfig:
    th_risk: float = 2.0
    th_head: float = math.radians(5.0)
    integration_step: float = 0.1
    tie_epsilon: float = 1e-9
    hierarchy: tuple[str, ...] = LEVELS

    def __post_init__(self) -> None:
        object.__setattr__(self, "hierarchy", tuple(self.hierarchy))
        if not (self.th_risk > 0.0):
            raise ValueError("th_risk must be positive (or inf)")
        if not (0.0 <= self.th_head < math.pi):
            raise ValueError("th_head must lie in [0, pi)")
        if not (self.integration_step > 0.0 and math.isfinite(self.integration_step)):
            raise ValueError("integration_step must be positive")
        if not (self.tie_epsilon >= 0.0):
            raise ValueError("tie_epsilon must be non-negative")
        if not self.hierarchy or any(h not in LEVEL_INDEX for h in self.hierarchy):
            raise ValueError(f"hierarchy must be drawn from {LEVELS}, got {self.hierarchy}")
        if len(set(self.hierarchy)) != len(self.hierarchy):
            raise ValueError("hierarchy levels must be distinct")
        # the bottom level has to be strictly positive along any edge
        if self.hierarchy[-1] != "distance":
            raise ValueError("the lowest-priority level must be 'distance'")

    @property
    def k(self) -> int:
        return len(self.hierarchy)

    @property
    def level_indices(self) -> tuple[int, ...]:
        return tuple(LEVEL_INDEX[h] for h in self.hierarchy)


def cost_vector(values: Sequence[float], k: int | None = None) -> CostVector:
    """Validate and freeze a cost vector."""
    vec = tuple(float(v) for v in values)
    if k is not None and len(vec) != k:
        raise ValueError(f"expected {k} cost levels, got {len(vec)}")
    if any(not (v >= 0.0) for v in vec):
        raise ValueError(f"cost entries must be non-negative: {vec}")
    return vec


def select_levels(full: Sequence[float], levels: Sequence[int]) -> CostVector:
    return tuple(full[i] for i in levels)


def add_costs(a: Sequence[float], b: Sequence[float]) -> CostVector:
    return tuple(x + y for x, y in zip(a, b))


def risk_values(points: np.ndarray, obstacles: ObstacleSet, cfg: CostConfig) -> np.ndarray:
    """Risk integrand at many points (vectorised :func:`risk_at`)."""
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    if math.isinf(cfg.th_risk) or not obstacles:
        return np.zeros(len(pts))
    d = obstacles.nearest_distances(pts)
    if np.any(d == 0.0):
        raise CollisionError("risk evaluated at a point lying on an obstacle")
    r = 1.0 / d
    return np.where(r > cfg.th_risk, r, 0.0)


def risk_at(p: Sequence[float], obstacles: ObstacleSet, cfg: CostConfig) -> float:
    """Inverse distance to the nearest obstacle when it exceeds ``th_risk``, else 0."""
    return float(risk_values(np.asarray(p, dtype=float)[:2], obstacles, cfg)[0])


def heading_penalty(h: float, ref_h: float, cfg: CostConfig) -> float:
    diff = angular_difference(h, ref_h)
    return diff if diff > cfg.th_head else 0.0


def _n_subsegments(length: np.ndarray | float, step: float):
    return np.maximum(np.ceil(np.asarray(length) / step - 1e-9), 1).astype(int)


def edge_costs_batch(
    starts: np.ndarray,
    ends: np.ndarray,
    obstacles: ObstacleSet,
    ref: ReferencePath,
    cfg: CostConfig,
) -> np.ndarray:
    """Canonical (risk, heading, distance) costs of straight edges, shape (n, 3).

    Midpoint rule: each edge is cut into ceil(length / step) equal pieces and the
    integrand is evaluated at every piece's midpoint.
    """
    a = np.asarray(starts, dtype=float).reshape(-1, 2)
    b = np.asarray(ends, dtype=float).reshape(-1, 2)
    d = b - a
    length = np.hypot(d[:, 0], d[:, 1])
    if np.any(length <= 0.0):
        raise InvalidGraphError("zero-length edge")
    n_sub = _n_subsegments(length, cfg.integration_step)
    owner = np.repeat(np.arange(len(a)), n_sub)
    first = np.concatenate(([0], np.cumsum(n_sub)[:-1]))
    local = np.arange(len(owner)) - np.repeat(first, n_sub)
    frac = (local + 0.5) / n_sub[owner]
    mids = a[owner] + frac[:, None] * d[owner]
    ds = (length / n_sub)[owner]

    out = np.empty((len(a), 3))
    risk = risk_values(mids, obstacles, cfg)
    out[:, 0] = np.bincount(owner, weights=risk * ds, minlength=len(a))

    travel = np.arctan2(d[:, 1], d[:, 0])[owner]
    _, _, _, ref_hd = project_points(mids, ref)
    diff = angular_difference_array(travel, ref_hd)
    head = np.where(diff > cfg.th_head, diff, 0.0)
    out[:, 1] = np.bincount(owner, weights=head * ds, minlength=len(a))
    out[:, 2] = length
    return out


def edge_cost(
    edge_geometry: Sequence[Sequence[float]],
    obstacles: ObstacleSet,
    ref: ReferencePath,
    cfg: CostConfig,
) -> CostVector:
    """Canonical (risk, heading, distance) cost of a polyline edge."""
    pts = np.asarray(edge_geometry, dtype=float).reshape(-1, 2)
    if len(pts) < 2:
        raise InvalidGraphError("edge geometry needs two or more points")
    seg = np.diff(pts, axis=0)
    seg_len = np.hypot(seg[:, 0], seg[:, 1])
    total = float(seg_len.sum())
    if total <= 0.0:
        raise InvalidGraphError("zero-length edge")
    if len(pts) == 2:
        return tuple(float(v) for v in edge_costs_batch(pts[:1], pts[1:], obstacles, ref, cfg)[0])

    n = int(_n_subsegments(total, cfg.integration_step))
    ds = total / n
    s_mid = (np.arange(n) + 0.5) * ds
    cum = np.concatenate(([0.0], np.cumsum(seg_len)))
    idx = np.clip(np.searchsorted(cum, s_mid, side="right") - 1, 0, len(seg) - 1)
    t = (s_mid - cum[idx]) / seg_len[idx]
    mids = pts[idx] + t[:, None] * seg[idx]
    travel = np.arctan2(seg[idx, 1], seg[idx, 0])
    risk = risk_values(mids, obstacles, cfg)
    _, _, _, ref_hd = project_points(mids, ref)
    diff = angular_difference_array(travel, ref_hd)
    head = np.where(diff > cfg.th_head, diff, 0.0)
    return (float(risk.sum() * ds), float(head.sum() * ds), total)


def tied(a: float, b: float, eps: float) -> bool:
    """Equality within relative tolerance ``eps`` (absolute ``eps`` near zero)."""
    if a == b:
        return True
    diff = abs(a - b)
    if diff == math.inf:
        return False
    return diff <= eps or diff <= eps * max(abs(a), abs(b))


def lex_compare(a: Sequence[float], b: Sequence[float], tie_epsilon: float = 0.0) -> int:
    """Return LESS, EQUAL or GREATER; the first non-tied level decides."""
    if len(a) != len(b):
        raise ValueError(f"cost vectors differ in length: {len(a)} vs {len(b)}")
    for x, y in zip(a, b):
        if tied(x, y, tie_epsilon):
            continue
        return LESS if x < y else GREATER
    return EQUAL


def lex_less(a: Sequence[float], b: Sequence[float], tie_epsilon: float = 0.0) -> bool:
    for x, y in zip(a, b):
        if x == y:
            continue
        diff = abs(x - y)
        if diff != math.inf and (diff <= tie_epsilon or diff <= tie_epsilon * max(abs(x), abs(y))):
            continue
        return x < y
    return False
