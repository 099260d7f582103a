"""Planar primitives: poses, reference polylines, projection and obstacle queries."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np
from scipy.spatial import cKDTree

# slack used when breaking projection ties between segments
_TIE_TOL = 1e-12


def normalize_angle(a: float) -> float:
    """Wrap an angle into (-pi, pi]."""
    a = math.fmod(a, 2.0 * math.pi)
    if a <= -math.pi:
        a += 2.0 * math.pi
    elif a > math.pi:
        a -= 2.0 * math.pi
    return a


def angular_difference(a: float, b: float) -> float:
    """Smallest absolute rotation between two headings, in [0, pi]."""
    d = abs(math.fmod(a - b, 2.0 * math.pi))
    if d > math.pi:
        d = 2.0 * math.pi - d
    return d


def angular_difference_array(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    d = np.abs(np.fmod(np.asarray(a, dtype=float) - b, 2.0 * np.pi))
    return np.where(d > np.pi, 2.0 * np.pi - d, d)


@dataclass(frozen=True)
class Pose2D:
    x: float
    y: float
    heading: float = 0.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "x", float(self.x))
        object.__setattr__(self, "y", float(self.y))
        object.__setattr__(self, "heading", normalize_angle(float(self.heading)))

    @property
    def xy(self) -> tuple[float, float]:
        return (self.x, self.y)

    def distance_to(self, other: "Pose2D") -> float:
        return math.hypot(self.x - other.x, self.y - other.y)

    def rotated(self, dtheta: float) -> "Pose2D":
        return Pose2D(self.x, self.y, self.heading + dtheta)


@dataclass(frozen=True)
class PathProjection:
    segment_index: int
    arclength: float
    lateral_offset: float
    segment_heading: float


@dataclass(frozen=True, eq=False)
class ReferencePath:
    """Polyline reference with cumulative arc length and per-segment headings.

    Arrays are made read-only after construction so instances can be shared.
    """

    vertices: np.ndarray
    cumulative_arclength: np.ndarray = field(init=False)
    segment_headings: np.ndarray = field(init=False)

    def __post_init__(self) -> None:
        v = np.array(self.vertices, dtype=float)
        if v.ndim != 2 or v.shape[1] != 2 or len(v) < 2:
            raise ValueError("reference path needs at least two (x, y) vertices")
        d = np.diff(v, axis=0)
        seg_len = np.hypot(d[:, 0], d[:, 1])
        if np.any(seg_len <= 0.0):
            bad = int(np.flatnonzero(seg_len <= 0.0)[0])
            raise ValueError(f"reference path vertices {bad} and {bad + 1} coincide")
        cum = np.concatenate(([0.0], np.cumsum(seg_len)))
        hd = np.arctan2(d[:, 1], d[:, 0])
        for arr in (v, cum, hd):
            arr.setflags(write=False)
        object.__setattr__(self, "vertices", v)
        object.__setattr__(self, "cumulative_arclength", cum)
        object.__setattr__(self, "segment_headings", hd)

    @classmethod
    def from_points(cls, points: Iterable[Sequence[float]], *, dedupe: bool = False) -> "ReferencePath":
        pts = np.asarray(list(points), dtype=float).reshape(-1, 2)
        if dedupe and len(pts) > 1:
            keep = np.ones(len(pts), dtype=bool)
            keep[1:] = np.hypot(*np.diff(pts, axis=0).T) > 1e-9
            pts = pts[keep]
        return cls(pts)

    @property
    def length(self) -> float:
        return float(self.cumulative_arclength[-1])

    @property
    def n_segments(self) -> int:
        return len(self.vertices) - 1

    @property
    def start(self) -> np.ndarray:
        return self.vertices[0]

    @property
    def end(self) -> np.ndarray:
        return self.vertices[-1]

    def segment_index_at(self, s: np.ndarray | float) -> np.ndarray | int:
        idx = np.searchsorted(self.cumulative_arclength, s, side="right") - 1
        idx = np.clip(idx, 0, self.n_segments - 1)
        return int(idx) if np.ndim(idx) == 0 else idx

    def sample(self, s: np.ndarray | float) -> tuple[np.ndarray, np.ndarray]:
        """Return (points, headings) at arc lengths ``s`` (clamped to the path)."""
        s_arr = np.clip(np.atleast_1d(np.asarray(s, dtype=float)), 0.0, self.length)
        idx = np.searchsorted(self.cumulative_arclength, s_arr, side="right") - 1
        idx = np.clip(idx, 0, self.n_segments - 1)
        t = s_arr - self.cumulative_arclength[idx]
        hd = self.segment_headings[idx]
        pts = self.vertices[idx] + t[:, None] * np.column_stack((np.cos(hd), np.sin(hd)))
        return pts, hd

    def pose_at(self, s: float) -> Pose2D:
        pts, hd = self.sample(s)
        return Pose2D(pts[0, 0], pts[0, 1], hd[0])

    def slice_from(self, s: float) -> "ReferencePath":
        """The part of the path beyond arc length ``s``."""
        s = min(max(float(s), 0.0), self.length)
        if s >= self.length - 1e-9:
            raise ValueError("nothing left of the path beyond the requested arc length")
        head, _ = self.sample(s)
        rest = self.vertices[self.cumulative_arclength > s + 1e-9]
        return ReferencePath.from_points(np.vstack((head, rest)), dedupe=True)

    def densified(self, step: float) -> np.ndarray:
        n = max(int(math.ceil(self.length / step)), 1)
        pts, _ = self.sample(np.linspace(0.0, self.length, n + 1))
        return pts


def _segment_distances(points: np.ndarray, a: np.ndarray, b: np.ndarray):
    """Per point/segment closest-point parameters and distances, shape (n_pts, n_seg)."""
    d = b - a
    len2 = np.einsum("ij,ij->i", d, d)
    rel = points[:, None, :] - a[None, :, :]
    t = np.clip(np.einsum("nsj,sj->ns", rel, d) / len2[None, :], 0.0, 1.0)
    closest = a[None, :, :] + t[..., None] * d[None, :, :]
    diff = points[:, None, :] - closest
    dist = np.hypot(diff[..., 0], diff[..., 1])
    cross = d[None, :, 0] * rel[..., 1] - d[None, :, 1] * rel[..., 0]
    return t, dist, cross


def project_points(points: np.ndarray, path: ReferencePath, chunk: int = 4096):
    """Vectorised projection of many points.

    Returns ``(segment_index, arclength, lateral_offset, segment_heading)`` arrays.
    """
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    a = path.vertices[:-1]
    b = path.vertices[1:]
    seg_len = np.diff(path.cumulative_arclength)
    out_idx = np.empty(len(pts), dtype=int)
    out_s = np.empty(len(pts))
    out_lat = np.empty(len(pts))
    for lo in range(0, len(pts), chunk):
        p = pts[lo:lo + chunk]
        t, dist, cross = _segment_distances(p, a, b)
        dmin = dist.min(axis=1)
        # first segment whose distance ties the minimum -> lower index wins
        idx = np.argmax(dist <= dmin[:, None] + _TIE_TOL, axis=1)
        rows = np.arange(len(p))
        sign = np.where(cross[rows, idx] < 0.0, -1.0, 1.0)
        out_idx[lo:lo + chunk] = idx
        out_s[lo:lo + chunk] = path.cumulative_arclength[idx] + t[rows, idx] * seg_len[idx]
        out_lat[lo:lo + chunk] = sign * dist[rows, idx]
    return out_idx, out_s, out_lat, path.segment_headings[out_idx]


def project_onto_path(p: Sequence[float], path: ReferencePath) -> PathProjection:
    """Project a point onto the globally nearest segment of ``path``.

    Beyond the endpoints the projection clamps to the endpoint. The lateral
    offset is positive to the left of the direction of travel.
    """
    idx, s, lat, hd = project_points(np.asarray(p, dtype=float)[:2].reshape(1, 2), path)
    return PathProjection(int(idx[0]), float(s[0]), float(lat[0]), float(hd[0]))


class ObstacleSet:
    """Immutable set of obstacle points backed by a k-d tree."""

    __slots__ = ("_points", "_tree")

    def __init__(self, points: Optional[Iterable[Sequence[float]]] = None):
        if points is None:
            arr = np.empty((0, 2))
        else:
            arr = np.asarray(points if isinstance(points, np.ndarray) else list(points), dtype=float)
            arr = arr.reshape(-1, 2)
        arr = np.array(arr, dtype=float)
        arr.setflags(write=False)
        self._points = arr
        self._tree = cKDTree(arr) if len(arr) else None

    @property
    def points(self) -> np.ndarray:
        return self._points

    def __len__(self) -> int:
        return len(self._points)

    def __bool__(self) -> bool:
        return len(self._points) > 0

    def __repr__(self) -> str:
        return f"ObstacleSet(n={len(self)})"

    def nearest_distances(self, points: np.ndarray) -> np.ndarray:
        """Distance from each query point to its nearest obstacle (inf when empty)."""
        q = np.asarray(points, dtype=float).reshape(-1, 2)
        if self._tree is None:
            return np.full(len(q), np.inf)
        d, _ = self._tree.query(q)
        return np.asarray(d, dtype=float)

    def in_collision(self, points: np.ndarray, radius: float) -> np.ndarray:
        return self.nearest_distances(points) < radius

    def segments_clear(self, starts: np.ndarray, ends: np.ndarray, radius: float) -> np.ndarray:
        """True for each segment whose every point stays at least ``radius`` from all obstacles.

        Exact point-to-segment distances; the k-d tree only prefilters candidates.
        """
        a = np.asarray(starts, dtype=float).reshape(-1, 2)
        b = np.asarray(ends, dtype=float).reshape(-1, 2)
        ok = np.ones(len(a), dtype=bool)
        if self._tree is None or len(a) == 0:
            return ok
        mid = 0.5 * (a + b)
        half = 0.5 * np.hypot(*(b - a).T)
        candidates = self._tree.query_ball_point(mid, half + radius)
        pts = self._points
        for i, cand in enumerate(candidates):
            if not cand:
                continue
            q = pts[cand]
            d = b[i] - a[i]
            len2 = d @ d
            if len2 > 0.0:
                t = np.clip(((q - a[i]) @ d) / len2, 0.0, 1.0)
                closest = a[i] + t[:, None] * d
            else:
                closest = a[i][None, :]
            if np.min(np.hypot(*(q - closest).T)) < radius:
                ok[i] = False
        return ok

    def union(self, other: "ObstacleSet") -> "ObstacleSet":
        return ObstacleSet(np.vstack((self._points, other._points)))


def distance_to_nearest(p: Sequence[float], obstacles: ObstacleSet) -> Optional[float]:
    """Euclidean distance to the nearest obstacle point, or None for an empty set."""
    if not obstacles:
        return None
    return float(obstacles.nearest_distances(np.asarray(p, dtype=float)[:2])[0])


def polyline_length(points: np.ndarray) -> float:
    d = np.diff(np.asarray(points, dtype=float), axis=0)
    return float(np.hypot(d[:, 0], d[:, 1]).sum())
