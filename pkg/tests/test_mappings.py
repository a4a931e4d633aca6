import numpy as np
import pytest
from hypothesis import given, strategies as st

from cadselect import fixtures
from cadselect.geometry import Ball, Box, sets_equal
from cadselect.mappings import (
    CadlagPath,
    CoefficientFunction,
    IntersectedMapping,
    Piece,
    RestrictedMapping,
    SetValuedMapping,
    TimeGrid,
    fattened_membership,
)

ALL = ["constant_box", "constant_ball", "step_mapping", "left_continuous_step", "shrinking_interval",
       "bounded_interval", "cadlag_interval", "sliding_interval", "moving_box", "moving_ball",
       "unit_simplex", "oscillating_singleton"]


def test_coefficient_function_right_and_left_values():
    f = CoefficientFunction([0, 0.5, 1], [[0.0], [2.0]], [[1.0], [3.0]], terminal=[5.0])
    assert f(0.25)[0] == pytest.approx(0.5)
    assert f(0.5)[0] == 2.0
    assert f.left_limit(0.5)[0] == pytest.approx(1.0)
    assert f(1.0)[0] == 5.0 and f.left_limit(1.0)[0] == pytest.approx(3.0)
    assert f.lipschitz_bound() == pytest.approx(2.0)
    with pytest.raises(ValueError):
        CoefficientFunction([0, 0], [1], [1])


def test_step_mapping_values_and_left_limits():
    m = fixtures.step_mapping()
    assert sets_equal(m.value(0.5), Box([2.0], [3.0]))
    assert sets_equal(m.left_limit(0.5), Box([0.0], [1.0]))
    assert sets_equal(m.value(0.49), Box([0.0], [1.0]))
    assert sets_equal(m.left_limit(0.0), Box([0.0], [0.0]))


def test_shrinking_interval_override():
    m = fixtures.shrinking_interval()
    assert sets_equal(m.value(1.0), Box([2.0], [2.0]))
    assert sets_equal(m.left_limit(1.0), Box([0.0], [0.0]))
    assert sets_equal(m.value(0.25), Box([0.0], [0.75]))


def test_oscillator_has_no_left_limit_at_its_end():
    m = fixtures.oscillating_singleton()
    assert m.horizon == pytest.approx(np.pi)
    assert m.left_limit(np.pi) is None
    t = 1.0
    assert np.allclose(m.value(t).project(np.zeros(1)), np.sin(1 / (np.pi - t)))


def test_partition_is_validated():
    p = Piece(0.0, 0.5, "box", {"lower": [0.0], "upper": [1.0]})
    with pytest.raises(ValueError):
        SetValuedMapping(1, 1.0, [p])
    with pytest.raises(ValueError):
        SetValuedMapping(1, 1.0, [])
    with pytest.raises(ValueError):
        Piece(0.0, 1.0, "cone", {})


@pytest.mark.parametrize("name", ALL)
def test_sequence_agrees_with_pointwise_values(name):
    m = getattr(fixtures, name)()
    grid = TimeGrid.for_mapping(m, 50)
    seq = m.sequence(grid.times)
    rng = np.random.default_rng(1)
    x = rng.uniform(-3, 3, (len(grid), m.dimension))
    ref = np.array([m.value(t).project(xi) for t, xi in zip(grid.times, x)])
    assert np.allclose(seq.project(x), ref, atol=1e-9)


def test_sequence_is_cached_and_not_shared_mutably():
    m = fixtures.moving_box()
    t = np.linspace(0, 1, 11)
    a = m.sequence(t)
    b = m.sequence(t)
    a.intersect_ball(np.array([0.5]), 1.0)
    assert np.allclose(b.project(np.full((11, 1), -5.0))[:, 0], t)


def test_restricted_mapping_window():
    m = fixtures.constant_box(0.0, 1.0)
    grid = TimeGrid(1.0, 10)
    # window ends are grid nodes, as in every caller
    r = RestrictedMapping(m, np.array([0.9]), 0.25, grid.times[2], grid.times[6])
    assert sets_equal(r.value(0.4), Box([0.65], [1.0]))
    assert sets_equal(r.value(0.1), Box([0.0], [1.0]))
    assert sets_equal(r.left_limit(grid.times[2]), Box([0.0], [1.0]))
    assert sets_equal(r.left_limit(grid.times[6]), Box([0.65], [1.0]))
    p = r.sequence(grid.times).project(np.zeros((11, 1)))[:, 0]
    assert np.allclose(p, np.where((np.arange(11) >= 2) & (np.arange(11) <= 6), 0.65, 0.0))


def test_intersected_mapping_with_fattening():
    a = fixtures.constant_box(0.0, 1.0)
    b = fixtures.constant_box(1.5, 2.0)
    m = IntersectedMapping(a, b, 0.75)
    assert sets_equal(m.value(0.3), Box([0.75], [1.0]))


def test_fattened_membership_is_strict():
    m = fixtures.constant_box(0.0, 1.0)
    assert fattened_membership(m, 0.5, np.array([1.2]), 0.25)
    assert not fattened_membership(m, 0.5, np.array([1.25]), 0.25)


def test_time_grid_contains_breakpoints():
    g = TimeGrid(1.0, 3, [0.5, 1 / 3 + 1e-14])
    assert 0.5 in g.times
    assert np.sum(np.abs(g.times - 1 / 3) < 1e-10) == 1
    assert g.is_breakpoint[g.index_of(0.5)]
    with pytest.raises(KeyError):
        g.index_of(0.4)


def test_cadlag_path_evaluation():
    t = np.array([0.0, 0.5, 1.0])
    y = CadlagPath(t, [[0.0], [2.0], [2.0]], [[0.0], [1.0], [2.0]])
    assert y(np.array([0.25]))[0, 0] == pytest.approx(0.5)
    assert y(np.array([0.5]))[0, 0] == 2.0
    assert y.left_limit(np.array([0.5]))[0, 0] == pytest.approx(1.0)
    assert y.jump_nodes().tolist() == [1]


@given(st.floats(0.0, 1.0), st.floats(-2, 2), st.floats(-2, 2))
def test_path_is_right_continuous_with_left_limits(t, a, b):
    times = np.linspace(0, 1, 6)
    right = np.linspace(a, b, 6)[:, None]
    left = right + 0.5
    y = CadlagPath(times, right, left)
    h = 1e-9
    if t + h <= 1:
        assert abs(y(np.array([t + h]))[0, 0] - y(np.array([t]))[0, 0]) <= 1e-6
    if t - h > 0:
        assert abs(y(np.array([t - h]))[0, 0] - y.left_limit(np.array([t]))[0, 0]) <= 1e-6


def test_lipschitz_and_bounding_box():
    m = fixtures.moving_ball()
    assert m.lipschitz_bound() == pytest.approx(0.25)
    lo, hi = m.bounding_box()
    assert np.allclose(lo, [-0.125, -0.125]) and np.allclose(hi, [0.375, 0.125])
