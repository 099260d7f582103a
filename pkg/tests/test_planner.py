import math

import numpy as np
import pytest

from lexplan.costs import CostConfig
from lexplan.errors import CollisionError
from lexplan.geometry import ObstacleSet, Pose2D, ReferencePath
from lexplan.graph import GraphConfig, generate_graph
from lexplan.planner import (
    ActivePath,
    FollowPath,
    GoalReached,
    HoldPosition,
    PlannerConfig,
    RecedingHorizonPlanner,
    linkable_init,
    path_blocked,
    splice_path,
)
from lexplan.search import extract_path, lex_search_heap

REF = ReferencePath.from_points([(0, 0), (20, 0)])
GCFG = GraphConfig()
CCFG = CostConfig()
ORIGIN = Pose2D(0.0, 0.0, 0.0)


def _disc(cx, cy, r, n=40):
    a = np.linspace(0, 2 * math.pi, n, endpoint=False)
    return np.column_stack((cx + r * np.cos(a), cy + r * np.sin(a)))


def _wall(x, half=3.0):
    ys = np.linspace(-half, half, 121)
    return ObstacleSet(np.column_stack((np.full_like(ys, x), ys)))


def test_clear_reference_is_followed_without_replanning():
    p = RecedingHorizonPlanner(REF, GCFG, CCFG)
    out = p.plan_step(ORIGIN, ObstacleSet())
    assert isinstance(out, FollowPath)
    np.testing.assert_allclose(out.path.points, REF.vertices)
    assert p.replan_count == 0


def test_goal_reached_within_tolerance():
    p = RecedingHorizonPlanner(REF, GCFG, CCFG)
    assert isinstance(p.plan_step(Pose2D(19.8, 0.1, 0.0), ObstacleSet()), GoalReached)
    assert not isinstance(p.plan_step(Pose2D(19.0, 0.0, 0.0), ObstacleSet()), GoalReached)


def test_robot_in_collision_raises():
    p = RecedingHorizonPlanner(REF, GCFG, CCFG)
    with pytest.raises(CollisionError):
        p.plan_step(ORIGIN, ObstacleSet([(0.1, 0.0)]))


def test_blocked_path_triggers_replan_around_obstacle():
    obs = ObstacleSet(_disc(3.0, 0.0, 0.25))
    p = RecedingHorizonPlanner(REF, GCFG, CCFG)
    out = p.plan_step(ORIGIN, obs)
    assert isinstance(out, FollowPath)
    assert p.replan_count == 1 and p.replans[0].reason == "blocked" and p.replans[0].success
    pts = out.path.points
    np.testing.assert_allclose(pts[0], [0, 0])
    np.testing.assert_allclose(pts[-1], [20, 0])
    assert not path_blocked(out.path, obs, GCFG, ORIGIN)
    # the next tick keeps the new path
    assert p.plan_step(ORIGIN, obs).path is out.path
    assert p.replan_count == 1


def test_full_blockage_holds_then_resumes():
    p = RecedingHorizonPlanner(REF, GCFG, CCFG)
    wall = _wall(3.0)
    out = p.plan_step(ORIGIN, wall)
    assert isinstance(out, HoldPosition) and out.pose == ORIGIN
    # unchanged inputs reuse the failed attempt
    assert isinstance(p.plan_step(ORIGIN, wall), HoldPosition)
    assert p.replans[-1].cached and p.replan_count == 1
    out = p.plan_step(ORIGIN, ObstacleSet())
    assert isinstance(out, FollowPath)
    assert p.replans[-1].reason == "hold-retry" and p.replans[-1].success


def test_risk_trigger_replans_unblocked_but_risky_path():
    # obstacle 0.35 m off the reference: not blocking (inflation 0.3), but inside the comfort zone
    obs = ObstacleSet(_disc(3.0, 0.5, 0.15))
    p = RecedingHorizonPlanner(REF, GCFG, CCFG)
    assert not path_blocked(p.active, obs, GCFG, ORIGIN)
    out = p.plan_step(ORIGIN, obs)
    assert p.replans and p.replans[0].reason == "risk"
    assert isinstance(out, FollowPath)
    off = RecedingHorizonPlanner(REF, GCFG, CCFG, PlannerConfig(risk_trigger=False))
    off.plan_step(ORIGIN, obs)
    assert off.replan_count == 0


def test_path_blocked_respects_sensor_window():
    sigma = ActivePath.from_reference(REF)
    far = ObstacleSet([(12.0, 0.0)])
    assert not path_blocked(sigma, far, GCFG, ORIGIN)
    assert path_blocked(sigma, far, GCFG, Pose2D(8.0, 0.0, 0.0))
    # already passed
    assert not path_blocked(sigma, ObstacleSet([(1.0, 0.0)]), GCFG, Pose2D(3.0, 0.0, 0.0))
    # between samples: exact segment distance catches it
    assert path_blocked(sigma, ObstacleSet([(2.05, 0.29)]), GCFG, ORIGIN)


def test_splice_path_joins_lattice_and_reference_tail():
    g = generate_graph(REF, ORIGIN, ObstacleSet(), GCFG, CCFG)
    nodes = extract_path(lex_search_heap(g, g.init_node), g.goal_node)
    ap = splice_path(ORIGIN, g, nodes, REF, None)
    pts = ap.points
    np.testing.assert_allclose(pts[0], [0, 0])
    np.testing.assert_allclose(ap.lattice_points[-1], g.positions[g.goal_node])
    np.testing.assert_allclose(pts[-1], [20, 0])
    assert np.all(np.hypot(*np.diff(pts, axis=0).T) > 0)


def test_linkable_init_skips_node_behind_obstacle():
    g = generate_graph(REF, ORIGIN, ObstacleSet(), GCFG, CCFG)
    assert linkable_init(ORIGIN, g, ObstacleSet(), 0.3) == g.init_node
    # an obstacle between the robot and station 1 on the reference
    obs = ObstacleSet([(0.3, -0.3)])
    x_c = Pose2D(0.0, -0.6, 0.0)
    g = generate_graph(REF, x_c, obs, GCFG, CCFG)
    init = linkable_init(x_c, g, obs, 0.3)
    assert init is not None
    assert obs.segments_clear(np.array([x_c.xy]), g.positions[init][None], 0.3)[0]


def test_replan_input_recorded():
    obs = ObstacleSet(_disc(3.0, 0.0, 0.25))
    p = RecedingHorizonPlanner(REF, GCFG, CCFG)
    p.plan_step(ORIGIN, obs)
    x_c, seen, ref = p.last_replan_input
    assert x_c == ORIGIN and seen is obs and ref.length == pytest.approx(20.0)
    assert p.last_graph is not None and p.replans[0].node_count == p.last_graph.n_nodes


def test_naive_and_heap_planners_agree():
    obs = ObstacleSet(np.vstack((_disc(3.0, 0.0, 0.25), _disc(5.0, 0.7, 0.2))))
    a = RecedingHorizonPlanner(REF, GCFG, CCFG, PlannerConfig(search="naive")).plan_step(ORIGIN, obs)
    b = RecedingHorizonPlanner(REF, GCFG, CCFG, PlannerConfig(search="heap")).plan_step(ORIGIN, obs)
    assert a.path.cost == b.path.cost
    np.testing.assert_array_equal(a.path.points, b.path.points)


@pytest.mark.parametrize("kwargs", [{"goal_tolerance": 0.0}, {"risk_increase_fraction": -1.0}, {"search": "bfs"}])
def test_planner_config_rejects(kwargs):
    with pytest.raises(ValueError):
        PlannerConfig(**kwargs)
