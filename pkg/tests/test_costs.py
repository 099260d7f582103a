import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

from lexplan.costs import (
    EQUAL,
    GREATER,
    LESS,
    CostConfig,
    cost_vector,
    edge_cost,
    edge_costs_batch,
    heading_penalty,
    lex_compare,
    lex_less,
    risk_at,
    select_levels,
    tied,
)
from lexplan.errors import CollisionError, InvalidGraphError
from lexplan.geometry import ObstacleSet, ReferencePath

CFG = CostConfig()
X_AXIS = ReferencePath.from_points([(-10, 0), (10, 0)])


def _row(y, x0=-2.0, x1=3.0, spacing=1e-3):
    xs = np.arange(x0, x1 + spacing / 2, spacing)
    return ObstacleSet(np.column_stack((xs, np.full_like(xs, y))))


# -- risk / heading integrands ---------------------------------------------

def test_risk_at_examples():
    obs = ObstacleSet([(0.4, 0.0)])
    assert risk_at((0, 0), obs, CFG) == pytest.approx(2.5)
    assert risk_at((0, 0), ObstacleSet([(1.0, 0.0)]), CFG) == 0.0
    # activation boundary sits at 1 / th_risk = 0.5 m
    assert risk_at((0, 0), ObstacleSet([(0.5, 0.0)]), CFG) == 0.0
    assert risk_at((0, 0), ObstacleSet([(0.49, 0.0)]), CFG) == pytest.approx(1 / 0.49)


def test_risk_at_infinite_threshold_and_empty_set():
    inf_cfg = CostConfig(th_risk=math.inf)
    assert risk_at((0, 0), ObstacleSet([(0.01, 0.0)]), inf_cfg) == 0.0
    assert risk_at((0, 0), ObstacleSet(), CFG) == 0.0


def test_risk_at_inside_obstacle_raises():
    with pytest.raises(CollisionError):
        risk_at((1, 1), ObstacleSet([(1, 1)]), CFG)


@given(st.floats(0.01, 5.0))
def test_risk_is_zero_or_raw_value(d):
    r = risk_at((0, 0), ObstacleSet([(d, 0.0)]), CFG)
    assert r == 0.0 or r == 1.0 / d


def test_heading_penalty_examples():
    assert heading_penalty(0.0, 0.0, CFG) == 0.0
    assert heading_penalty(math.radians(3), 0.0, CFG) == 0.0
    assert heading_penalty(math.radians(10), 0.0, CFG) == pytest.approx(0.17453, abs=1e-5)
    assert heading_penalty(math.radians(-170), math.radians(170), CFG) == pytest.approx(math.radians(20))


# -- edge costs --------------------------------------------------------------

def test_edge_cost_aligned_free_edge():
    assert edge_cost([(0, 0), (1, 0)], ObstacleSet(), X_AXIS, CFG) == (0.0, 0.0, 1.0)


def test_edge_cost_constant_risk():
    c = edge_cost([(0, 0), (1, 0)], _row(0.25), X_AXIS, CFG)
    assert c[0] == pytest.approx(4.0, rel=1e-5)
    assert c[2] == 1.0


def test_edge_cost_constant_heading():
    a = math.radians(10)
    c = edge_cost([(0, 0), (math.cos(a), math.sin(a))], ObstacleSet(), X_AXIS, CFG)
    assert c[1] == pytest.approx(0.17453, abs=1e-5)
    half = edge_cost([(0, 0), (math.cos(a), math.sin(a))], ObstacleSet(), X_AXIS,
                     CostConfig(integration_step=0.05))
    assert half[1] == pytest.approx(c[1], rel=1e-12)
    assert c[2] == pytest.approx(1.0)


def test_edge_risk_matches_adaptive_quadrature():
    obs = ObstacleSet([(0.5, 0.3), (1.2, -0.35)])
    a, b = np.array([0.0, 0.0]), np.array([2.0, 0.1])
    L = float(np.hypot(*(b - a)))

    def integrand(t):
        p = a + t * (b - a)
        d = float(obs.nearest_distances(p)[0])
        r = 1.0 / d
        return r if r > CFG.th_risk else 0.0

    want, _ = integrate.quad(integrand, 0.0, 1.0, limit=400, points=[0.25, 0.6])
    got = edge_cost([a, b], obs, X_AXIS, CostConfig(integration_step=0.001))[0]
    assert got == pytest.approx(want * L, rel=2e-3)


def test_far_obstacle_gives_exactly_zero_risk():
    c = edge_cost([(0, 0), (3, 0)], ObstacleSet([(1.5, 0.51)]), X_AXIS, CFG)
    assert c[0] == 0.0


def test_zero_length_edge_raises():
    with pytest.raises(InvalidGraphError):
        edge_cost([(1, 1), (1, 1)], ObstacleSet(), X_AXIS, CFG)
    with pytest.raises(InvalidGraphError):
        edge_costs_batch(np.array([[0, 0]]), np.array([[0, 0]]), ObstacleSet(), X_AXIS, CFG)


def test_batch_matches_single_edges(rng):
    starts = rng.uniform(-3, 3, size=(20, 2))
    ends = starts + rng.uniform(0.2, 1.5, size=(20, 2))
    obs = ObstacleSet(rng.uniform(-4, 4, size=(15, 2)) + np.array([0, 5]))
    batch = edge_costs_batch(starts, ends, obs, X_AXIS, CFG)
    for i in range(len(starts)):
        np.testing.assert_allclose(batch[i], edge_cost([starts[i], ends[i]], obs, X_AXIS, CFG), rtol=1e-12)


@settings(max_examples=40, deadline=None)
@given(st.floats(-0.45, 0.45), st.floats(0.5, 2.0), st.floats(0.0, 0.6), st.floats(0.3, 0.45))
def test_halving_step_converges(y0, length, angle, clearance):
    # a low threshold keeps the risk integrand switched on (and smooth) along the whole edge;
    # the on/off jump at the threshold is a discontinuity no fixed step resolves
    cfg = CostConfig(th_risk=0.05)
    a = np.array([0.0, y0])
    b = a + length * np.array([math.cos(angle), math.sin(angle)])
    mid = 0.5 * (a + b)
    normal = np.array([-math.sin(angle), math.cos(angle)])
    obs = ObstacleSet([mid + clearance * normal])
    c1 = edge_cost([a, b], obs, X_AXIS, cfg)
    c2 = edge_cost([a, b], obs, X_AXIS, CostConfig(th_risk=0.05, integration_step=cfg.integration_step / 2))
    for lvl in (0, 1):
        if c2[lvl] > 1e-3:
            assert abs(c1[lvl] - c2[lvl]) / c2[lvl] < 0.05


def test_distance_strictly_positive(rng):
    starts = rng.uniform(-1, 1, size=(50, 2))
    ends = starts + rng.uniform(1e-4, 1, size=(50, 2))
    assert np.all(edge_costs_batch(starts, ends, ObstacleSet(), X_AXIS, CFG)[:, 2] > 0)


# -- comparison -------------------------------------------------------------

def test_lex_compare_examples():
    assert lex_compare((0, 5, 3), (1, 0, 0)) == LESS
    assert lex_compare((1, 2, 3), (1, 2, 4)) == LESS
    assert lex_compare((2, 2, 2), (2, 2, 2)) == EQUAL
    assert lex_compare((1, 0, 0), (0, 5, 3)) == GREATER


def test_lex_compare_tolerance():
    assert lex_compare((1.0, 5.0), (1.0 + 1e-12, 3.0), 1e-9) == GREATER
    assert lex_compare((1.0, 5.0), (1.0 + 1e-12, 3.0), 0.0) == LESS
    assert lex_compare((0.0,), (1e-10,), 1e-9) == EQUAL
    assert not tied(math.inf, 1.0, 1.0)
    assert tied(math.inf, math.inf, 0.0)


def test_lex_compare_length_mismatch():
    with pytest.raises(ValueError):
        lex_compare((1, 2), (1, 2, 3))


vec3 = st.tuples(*[st.sampled_from([0.0, 0.5, 1.0, 2.0, 1.0 + 1e-12]) for _ in range(3)])


@settings(max_examples=300)
@given(vec3, vec3, vec3, st.sampled_from([0.0, 1e-9]))
def test_lex_compare_total_preorder(a, b, c, eps):
    ab, ba = lex_compare(a, b, eps), lex_compare(b, a, eps)
    assert ab == -ba
    assert lex_less(a, b, eps) == (ab == LESS)
    if ab <= EQUAL and lex_compare(b, c, eps) <= EQUAL:
        assert lex_compare(a, c, eps) <= EQUAL


def test_lex_compare_transitive_random_triples(rng):
    vals = rng.integers(0, 3, size=(10_000, 3, 3)).astype(float)
    for a, b, c in vals:
        if lex_compare(a, b) == LESS and lex_compare(b, c) == LESS:
            assert lex_compare(a, c) == LESS


# -- config and vectors -------------------------------------------------------

@pytest.mark.parametrize("kwargs", [
    {"th_risk": 0.0},
    {"th_head": math.pi},
    {"integration_step": 0.0},
    {"tie_epsilon": -1.0},
    {"hierarchy": ("risk", "heading")},
    {"hierarchy": ("distance", "distance")},
    {"hierarchy": ("speed", "distance")},
])
def test_cost_config_rejects(kwargs):
    with pytest.raises(ValueError):
        CostConfig(**kwargs)


def test_hierarchy_projection():
    cfg = CostConfig(hierarchy=("heading", "distance"))
    assert cfg.k == 2
    assert select_levels((3.0, 2.0, 1.0), cfg.level_indices) == (2.0, 1.0)
    assert CostConfig(th_risk=math.inf).th_risk == math.inf


def test_cost_vector_validation():
    assert cost_vector([1, 2], 2) == (1.0, 2.0)
    with pytest.raises(ValueError):
        cost_vector([1, -1])
    with pytest.raises(ValueError):
        cost_vector([1, 2], 3)
