"""Scenario documents: JSON <-> :class:`~lexplan.sim.Scenario`.

Units are metres, seconds and radians. Any angle may instead be given in
degrees by suffixing its key with ``_deg`` (``heading_deg``, ``th_head_deg``).
Infinite thresholds are written as the string ``"inf"``.
"""
from __future__ import annotations

import copy
import dataclasses
import json
import math
from importlib import resources
from pathlib import Path
from typing import Any, Union

import numpy as np

from .costs import CostConfig
from .errors import ScenarioError
from .geometry import Pose2D, ReferencePath
from .graph import GraphConfig
from .planner import PlannerConfig
from .sim import ObstacleCluster, Scenario, SimConfig

SCHEMA_VERSION = 1
BUNDLED = ("fig3_straight_blocked", "fig4_ushape_static", "fig8_pool_dynamic", "blocked_corridor", "empty_straight")

_ANGLE_FIELDS = {"heading", "th_head", "max_heading_change"}


def _num(value: Any, where: str) -> float:
    if isinstance(value, str) and value.strip().lower() in ("inf", "infinity"):
        return math.inf
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ScenarioError(where, f"expected a number, got {value!r}")
    return float(value)


def _encode_num(value: float):
    return "inf" if math.isinf(value) else value


def _angles(section: dict, where: str) -> dict:
    out = {}
    for key, value in section.items():
        if key.endswith("_deg"):
            base = key[:-4]
            if base not in _ANGLE_FIELDS:
                raise ScenarioError(f"{where}.{key}", "no angle field of that name")
            if base in section:
                raise ScenarioError(f"{where}.{key}", f"given together with {base!r}")
            out[base] = math.radians(_num(value, f"{where}.{key}"))
        else:
            out[key] = value
    return out


def _config(cls, raw: Any, where: str, typed: dict[str, type]):
    if raw is None:
        return cls()
    if not isinstance(raw, dict):
        raise ScenarioError(where, "expected an object")
    values = _angles(raw, where)
    names = {f.name for f in dataclasses.fields(cls)}
    kwargs = {}
    for key, value in values.items():
        if key not in names:
            raise ScenarioError(f"{where}.{key}", "unknown field")
        kind = typed.get(key, float)
        if kind is float:
            kwargs[key] = _num(value, f"{where}.{key}")
        elif kind is int:
            if isinstance(value, bool) or not isinstance(value, int):
                raise ScenarioError(f"{where}.{key}", f"expected an integer, got {value!r}")
            kwargs[key] = value
        elif kind is bool:
            if not isinstance(value, bool):
                raise ScenarioError(f"{where}.{key}", f"expected true/false, got {value!r}")
            kwargs[key] = value
        elif kind is tuple:
            if not isinstance(value, list) or not all(isinstance(v, str) for v in value):
                raise ScenarioError(f"{where}.{key}", "expected a list of strings")
            kwargs[key] = tuple(value)
        else:
            if not isinstance(value, str):
                raise ScenarioError(f"{where}.{key}", f"expected a string, got {value!r}")
            kwargs[key] = value
    try:
        return cls(**kwargs)
    except (ValueError, TypeError) as exc:
        raise ScenarioError(where, str(exc)) from None


def _points(raw: Any, where: str, min_len: int = 0) -> np.ndarray:
    try:
        arr = np.asarray(raw, dtype=float)
    except (TypeError, ValueError):
        raise ScenarioError(where, "expected a list of [x, y] pairs") from None
    if arr.size == 0 and min_len == 0:
        return np.empty((0, 2))
    if arr.ndim != 2 or arr.shape[1] != 2 or not np.all(np.isfinite(arr)):
        raise ScenarioError(where, "expected a list of finite [x, y] pairs")
    if len(arr) < min_len:
        raise ScenarioError(where, f"needs at least {min_len} points")
    return arr


def scenario_from_dict(doc: dict) -> Scenario:
    if not isinstance(doc, dict):
        raise ScenarioError("<root>", "expected a JSON object")
    version = doc.get("schema_version", SCHEMA_VERSION)
    if version != SCHEMA_VERSION:
        raise ScenarioError("schema_version", f"unsupported version {version!r}")
    known = {"schema_version", "name", "description", "reference_path", "robot_start", "obstacles",
             "graph_config", "cost_config", "planner_config", "sim"}
    for key in doc:
        if key not in known:
            raise ScenarioError(key, "unknown field")
    for key in ("reference_path", "robot_start"):
        if key not in doc:
            raise ScenarioError(key, "missing required field")

    rp = doc["reference_path"]
    if not isinstance(rp, dict) or "vertices" not in rp:
        raise ScenarioError("reference_path.vertices", "missing required field")
    try:
        ref = ReferencePath(_points(rp["vertices"], "reference_path.vertices", 2))
    except ValueError as exc:
        if isinstance(exc, ScenarioError):
            raise
        raise ScenarioError("reference_path.vertices", str(exc)) from None

    rs = doc["robot_start"]
    if not isinstance(rs, dict):
        raise ScenarioError("robot_start", "expected an object")
    rs = _angles(rs, "robot_start")
    for key in rs:
        if key not in ("x", "y", "heading"):
            raise ScenarioError(f"robot_start.{key}", "unknown field")
    for key in ("x", "y"):
        if key not in rs:
            raise ScenarioError(f"robot_start.{key}", "missing required field")
    start = Pose2D(_num(rs["x"], "robot_start.x"), _num(rs["y"], "robot_start.y"),
                   _num(rs.get("heading", 0.0), "robot_start.heading"))

    clusters = []
    raw_obs = doc.get("obstacles", [])
    if not isinstance(raw_obs, list):
        raise ScenarioError("obstacles", "expected a list")
    for i, ob in enumerate(raw_obs):
        where = f"obstacles[{i}]"
        if not isinstance(ob, dict):
            raise ScenarioError(where, "expected an object")
        for key in ob:
            if key not in ("name", "points", "motion"):
                raise ScenarioError(f"{where}.{key}", "unknown field")
        if "points" not in ob:
            raise ScenarioError(f"{where}.points", "missing required field")
        pts = _points(ob["points"], f"{where}.points", 1)
        motion = ob.get("motion")
        if motion is not None:
            try:
                m = np.asarray(motion, dtype=float)
            except (TypeError, ValueError):
                raise ScenarioError(f"{where}.motion", "expected [[t, dx, dy], ...]") from None
            if m.ndim != 2 or m.shape[1] != 3 or len(m) == 0:
                raise ScenarioError(f"{where}.motion", "expected [[t, dx, dy], ...]")
            motion = m
        try:
            clusters.append(ObstacleCluster(pts, motion, str(ob.get("name", ""))))
        except ValueError as exc:
            raise ScenarioError(f"{where}.motion", str(exc)) from None

    gcfg = _config(GraphConfig, doc.get("graph_config"), "graph_config", {"connectivity": str})
    ccfg = _config(CostConfig, doc.get("cost_config"), "cost_config", {"hierarchy": tuple})
    pcfg = _config(PlannerConfig, doc.get("planner_config"), "planner_config",
                   {"risk_trigger": bool, "early_exit": bool, "search": str})
    scfg = _config(SimConfig, doc.get("sim"), "sim", {"max_ticks": int, "seed": int})

    sc = Scenario(str(doc.get("name", "unnamed")), ref, start, clusters, gcfg, ccfg, pcfg, scfg,
                  str(doc.get("description", "")))
    try:
        sc.validate()
    except Exception as exc:
        raise ScenarioError("robot_start", str(exc)) from None
    return sc


def _config_dict(cfg) -> dict:
    out = {}
    for f in dataclasses.fields(cfg):
        v = getattr(cfg, f.name)
        if isinstance(v, tuple):
            v = list(v)
        elif isinstance(v, float):
            v = _encode_num(v)
        out[f.name] = v
    return out


def scenario_to_dict(sc: Scenario) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "name": sc.name,
        "description": sc.description,
        "reference_path": {"vertices": sc.reference_path.vertices.tolist()},
        "robot_start": {"x": sc.robot_start.x, "y": sc.robot_start.y, "heading": sc.robot_start.heading},
        "obstacles": [
            {
                "name": c.name,
                "points": c.points.tolist(),
                "motion": None if c.motion is None else c.motion.tolist(),
            }
            for c in sc.obstacles
        ],
        "graph_config": _config_dict(sc.graph_config),
        "cost_config": _config_dict(sc.cost_config),
        "planner_config": _config_dict(sc.planner_config),
        "sim": _config_dict(sc.sim),
    }


def parse_override(text: str) -> tuple[list[str], Any]:
    if "=" not in text:
        raise ScenarioError(text, "override must look like key.path=value")
    key, raw = text.split("=", 1)
    path = [p for p in key.strip().split(".") if p]
    if not path:
        raise ScenarioError(text, "empty override key")
    try:
        value = json.loads(raw)
    except json.JSONDecodeError:
        value = raw
    return path, value


def apply_overrides(doc: dict, overrides) -> dict:
    """Return a copy of ``doc`` with dotted-path ``key=value`` overrides applied."""
    doc = copy.deepcopy(doc)
    for text in overrides or ():
        path, value = parse_override(text)
        node = doc
        for part in path[:-1]:
            nxt = node.get(part)
            if nxt is None:
                nxt = node[part] = {}
            if not isinstance(nxt, dict):
                raise ScenarioError(".".join(path), f"{part!r} is not an object")
            node = nxt
        leaf = path[-1]
        # an override in one unit replaces the other spelling of the same angle
        if leaf.endswith("_deg"):
            node.pop(leaf[:-4], None)
        else:
            node.pop(leaf + "_deg", None)
        node[leaf] = value
    return doc


def bundled_path(name: str) -> Path:
    return Path(str(resources.files("lexplan") / "bundled" / f"{name}.json"))


def load_document(source: Union[str, Path]) -> dict:
    """Read a scenario document from a file path or a bundled scenario name."""
    path = Path(source)
    if not path.exists() and str(source) in BUNDLED:
        path = bundled_path(str(source))
    try:
        text = path.read_text()
    except OSError as exc:
        raise ScenarioError("<file>", f"cannot read {source}: {exc.strerror}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError("<json>", f"line {exc.lineno} column {exc.colno}: {exc.msg}") from None


def load_scenario(source: Union[str, Path], overrides=None) -> Scenario:
    return scenario_from_dict(apply_overrides(load_document(source), overrides))


def dump_scenario(sc: Scenario, path: Union[str, Path]) -> None:
    Path(path).write_text(json.dumps(scenario_to_dict(sc), indent=1) + "\n")
