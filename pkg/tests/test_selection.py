import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cadselect import fixtures
from cadselect.errors import SelectionInfeasible
from cadselect.mappings import TimeGrid
from cadselect.oracle import dense_excess, grid_distance
from cadselect.regularity import check_regularity
from cadselect.selection import (
    backward_selection,
    castaing_family,
    castaing_targets,
    contraction_gaps,
    epsilon_selection,
    family_excess,
    family_values,
    membership_gap,
    michael_selection,
    projection_selection,
    refinement_schedule,
)

BATTERY = ["shrinking_interval", "bounded_interval", "cadlag_interval", "constant_box",
           "step_mapping", "moving_ball"]


def test_refinement_schedule():
    eps = refinement_schedule(1e-6)
    assert eps == [1.0, 0.5, 0.125, 2.0**-6, 2.0**-10, 2.0**-15, 2.0**-21]
    assert refinement_schedule(0.3) == [1.0, 0.5, 0.125]


def _oracle_gap(mapping, times, values, step=1e-3):
    return max(grid_distance(mapping.value(t), v, step) for t, v in zip(times, values))


@pytest.mark.parametrize("name", BATTERY)
def test_epsilon_selection_stays_in_the_open_fattening(checked, name):
    m, grid, report = checked(name)
    for eps in (0.5, 0.1, 0.01):
        y = epsilon_selection(m, eps, report.d1, grid)
        assert membership_gap(m, grid, y) < eps
        jumps = set(grid.times[y.jump_nodes(1e-12)].tolist())
        assert jumps <= set(report.d1)


@given(st.sampled_from(BATTERY), st.floats(0.005, 1.0))
@settings(max_examples=20)
def test_epsilon_selection_property(name, eps):
    m = getattr(fixtures, name)()
    grid = TimeGrid.for_mapping(m, 200)
    d1 = fixtures.DISCONTINUITY_SETS.get(name, ((), ()))[0]
    y = epsilon_selection(m, eps, d1, grid)
    assert membership_gap(m, grid, y) < eps


@pytest.mark.parametrize("name", BATTERY)
def test_michael_contracts_and_lands_in_values(checked, name):
    m, grid, report = checked(name)
    y, its = michael_selection(m, 1e-6, report, grid, return_iterates=True)
    eps = refinement_schedule(1e-6)
    for i, gap in enumerate(contraction_gaps(its), start=1):
        assert gap <= 2 * eps[i] + 1e-9
    assert membership_gap(m, grid, y) <= 1e-6 + 1e-9
    assert y.flag == "projected"
    sub = slice(None, None, 97)
    assert _oracle_gap(m, grid.times[sub], y.right[sub]) <= 1e-3 + 1e-9


def test_michael_jumps_only_at_left_jump_times(checked):
    m, grid, report = checked("cadlag_interval")
    y = michael_selection(m, 1e-6, report, grid)
    assert set(grid.times[y.jump_nodes(1e-9)].tolist()) <= {0.7}
    j = grid.index_of(0.7)
    assert m.left_limit(0.7).contains(y.left[j], 1e-9)


def test_michael_refuses_failing_report(checked):
    m, grid, report = checked("oscillating_singleton")
    with pytest.raises(SelectionInfeasible):
        michael_selection(m, 1e-6, report, grid)
    with pytest.raises(SelectionInfeasible):
        michael_selection(m, 1e-6, None, grid)


def test_projection_selection_on_constant_ball():
    m = fixtures.constant_ball()
    grid = TimeGrid.for_mapping(m, 10)
    y = projection_selection(m, np.array([2.0, 0.0]), grid)
    assert np.allclose(y.right, [1.0, 0.0])


@pytest.mark.parametrize("name", ["step_mapping", "cadlag_interval", "bounded_interval", "shrinking_interval"])
def test_projection_selection_left_limit_law(name, rng):
    m = getattr(fixtures, name)()
    grid = TimeGrid.for_mapping(m, 1000)
    for x in rng.uniform(-3, 3, (5, m.dimension)):
        y = projection_selection(m, x, grid)
        for t in m.breakpoints[m.breakpoints > 0]:
            j = grid.index_of(t)
            assert np.linalg.norm(y.left[j] - m.left_limit(t).project(x)) <= 1e-6
            assert np.linalg.norm(y.right[j] - m.value(t).project(x)) <= 1e-9


def test_castaing_targets_are_sorted_with_proper_runs(checked):
    m, grid, report = checked("step_mapping")
    targets = castaing_targets(m, grid, 3, d1=report.d1)
    keys = [(tg.m, tg.k) for tg in targets.targets]
    assert keys == sorted(keys)
    j = grid.index_of(0.5)
    for tg in targets.targets:
        for a, b in tg.runs:
            assert a < b
            assert not (a < j <= b) or a == j


def test_castaing_family_is_dense_on_constant_box(checked):
    m, grid, report = checked("constant_box")
    K = 4
    fam = castaing_family(m, castaing_targets(m, grid, K, d1=report.d1), 1e-6, report, grid)
    vals = family_values(fam)
    assert np.max(family_excess(m, grid, vals)) <= 2 * 2.0**-K + 1e-9
    # dense oracle at a few nodes
    for j in (0, 500, 1000):
        assert dense_excess(m.value(grid.times[j]), vals[:, j, :], 1e-3) <= 2 * 2.0**-K + 1e-3


def test_castaing_family_refuses_oscillator(checked):
    m, grid, report = checked("oscillating_singleton")
    targets = castaing_targets(m, grid, 2, d1=report.d1)
    with pytest.raises(SelectionInfeasible):
        castaing_family(m, targets, 1e-6, report, grid)


def test_castaing_adds_terminal_variants_at_a_jump_horizon(checked):
    m, grid, report = checked("shrinking_interval")
    fam = castaing_family(m, castaing_targets(m, grid, 2, d1=report.d1), 1e-6, report, grid)
    terminal = [f for f in fam if f.target[0] == -1]
    assert terminal and all(np.allclose(f.path.right[-1], 2.0) for f in terminal)


@pytest.mark.parametrize("name", BATTERY + ["moving_box", "sliding_interval", "constant_ball", "unit_simplex"])
@pytest.mark.parametrize("start", [None, 0.1, -2.0])
def test_michael_moves_at_most_lipschitz_off_jump_times(checked, name, start):
    m, grid, report = checked(name)
    x = None if start is None else np.full(m.dimension, start)
    y = michael_selection(m, 1e-6, report, grid, start=x)
    L, bps, t = m.lipschitz_bound(), np.asarray(m.breakpoints), grid.times
    for j in range(len(t) - 1):
        if np.any((bps > t[j]) & (bps <= t[j + 1])):
            continue  # different pieces
        assert np.linalg.norm(y.right[j + 1] - y.right[j]) <= L * (t[j + 1] - t[j]) + 2e-6


@pytest.mark.parametrize("name", ["bounded_interval", "cadlag_interval", "step_mapping"])
def test_backward_selection_is_exact_and_continuous_off_d1(checked, name):
    m, grid, report = checked(name)
    y = backward_selection(m, report.d1, grid, np.array([0.3]))
    assert membership_gap(m, grid, y) <= 1e-9
    assert set(grid.times[y.jump_nodes(1e-12)].tolist()) <= set(report.d1)
    for t in report.d1:
        j = grid.index_of(t)
        assert float(m.left_limit(t).distance(y.left[j])) <= 1e-9


@pytest.mark.parametrize("name", BATTERY)
def test_castaing_values_lie_in_the_values(checked, name):
    m, grid, report = checked(name)
    fam = castaing_family(m, castaing_targets(m, grid, 3, d1=report.d1), 1e-6, report, grid)
    for member in fam:
        assert membership_gap(m, grid, member.path) <= 1e-9
