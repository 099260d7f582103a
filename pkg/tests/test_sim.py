import json
import math

import numpy as np
import pytest

from lexplan import scenarios
from lexplan.errors import CollisionError
from lexplan.geometry import Pose2D, ReferencePath
from lexplan.sim import ObstacleCluster, Scenario, SimConfig, World, run_scenario, sense

# golden value for the seeded U-shape scenario (fixed after the first full run)
FIG4_REPLANS = 16


def test_cluster_motion_interpolates_and_holds():
    c = ObstacleCluster(np.array([[0.0, 0.0]]), np.array([[1.0, 0.0, 0.0], [3.0, 2.0, -2.0]]))
    assert c.offset_at(0.0) == (0.0, 0.0)
    assert c.offset_at(2.0) == (1.0, -1.0)
    assert c.offset_at(10.0) == (2.0, -2.0)
    np.testing.assert_allclose(c.points_at(2.0), [[1.0, -1.0]])
    assert ObstacleCluster(np.zeros((1, 2))).is_static


def test_cluster_rejects_unsorted_schedule():
    with pytest.raises(ValueError):
        ObstacleCluster(np.zeros((1, 2)), np.array([[1.0, 0, 0], [1.0, 1, 1]]))


def test_sense_range_and_memory():
    truth = np.array([[1.0, 0.0], [8.0, 0.0]])
    obs, mem = sense(truth, Pose2D(0, 0, 0), 5.0)
    np.testing.assert_allclose(obs.points, [[1.0, 0.0]])
    # moved away: the remembered point survives outside the disk
    obs, mem = sense(np.empty((0, 2)), Pose2D(7.0, 0, 0), 5.0, mem)
    np.testing.assert_allclose(obs.points, [[1.0, 0.0]])
    # back in range with nothing there: the stale memory is dropped
    obs, mem = sense(np.empty((0, 2)), Pose2D(0.0, 0, 0), 5.0, mem)
    assert len(obs) == 0


@pytest.mark.parametrize("bad", [{"tick_dt": 0.0}, {"robot_speed": -1.0}, {"max_ticks": 0}])
def test_sim_config_rejects(bad):
    with pytest.raises(ValueError):
        SimConfig(**bad)


def test_start_in_obstacle_is_rejected():
    sc = Scenario("bad", ReferencePath.from_points([(0, 0), (5, 0)]), Pose2D(0, 0, 0),
                  [ObstacleCluster(np.array([[0.1, 0.0]]))])
    with pytest.raises(CollisionError):
        sc.validate()


def test_empty_straight_run():
    m = run_scenario(scenarios.empty_straight())
    assert m.goal_reached and m.replan_count == 0
    assert len(m.trace) == m.ticks_elapsed + 1
    ys = np.array([p.y for p in m.executed_path])
    assert np.all(np.abs(ys) <= 0.25 / 2)
    assert m.trace[0].kind == "start" and m.trace[-1].kind == "goal"
    assert m.accumulated_costs[0] == 0.0 and m.accumulated_costs[1] == 0.0


def test_robot_moves_at_configured_speed():
    sc = scenarios.empty_straight()
    w = World(sc)
    w.step()
    assert w.robot.x == pytest.approx(sc.sim.robot_speed * sc.sim.tick_dt)


def test_fig3_avoids_obstacles():
    m = run_scenario(scenarios.fig3_straight_blocked())
    assert m.goal_reached and not m.collided
    assert m.replan_count > 0
    assert m.min_clearance >= scenarios.fig3_straight_blocked().graph_config.inflation_radius


def test_fig4_golden_replan_count():
    m = run_scenario(scenarios.fig4_ushape_static())
    assert m.goal_reached and not m.collided
    assert m.replan_count == FIG4_REPLANS


def test_blocked_corridor_holds_until_timeout():
    sc = scenarios.blocked_corridor()
    m = run_scenario(sc)
    assert not m.goal_reached and not m.collided
    assert m.ticks_elapsed == sc.sim.max_ticks
    assert m.hold_intervals and m.hold_intervals[-1][1] == sc.sim.max_ticks
    # holding means not moving
    start, end = m.hold_intervals[-1]
    held = m.executed_path[start:end + 1]
    assert len({(p.x, p.y) for p in held}) == 1


def test_metrics_json_excludes_timing_by_default():
    m = run_scenario(scenarios.fig3_straight_blocked())
    d = m.to_dict()
    assert d["schema_version"] == 1
    assert all("search_seconds" not in r for r in d["replans"])
    assert "search_seconds" in m.to_dict(include_timing=True)["replans"][0]
    json.dumps(d)


def test_random_scenarios_are_valid_and_deterministic():
    a = scenarios.random_scenario(5)
    b = scenarios.random_scenario(5)
    np.testing.assert_array_equal(a.obstacle_points_at(0), b.obstacle_points_at(0))
    a.validate()


def test_collision_is_reported_not_raised():
    # an obstacle that drives into the robot
    ref = ReferencePath.from_points([(0, 0), (10, 0)])
    ram = ObstacleCluster(np.array([[4.0, 0.0]]), np.array([[0.0, 0.0, 0.0], [1.0, -3.9, 0.0]]))
    sc = Scenario("ram", ref, Pose2D(0, 0, 0), [ram], sim=SimConfig(max_ticks=50))
    m = run_scenario(sc)
    assert m.collided and m.error
    assert not m.goal_reached
    assert math.isfinite(m.min_clearance)
