"""Acceptance suite: one group of tests per criterion.

Each test carries a ``criterion`` marker; the terminal summary prints one
PASS/FAIL line per criterion (see ``conftest.py``). Run on its own with

    pytest tests/test_acceptance.py -v
"""

import filecmp
import os
import subprocess
import sys
import time

import numpy as np
import pytest

from cadselect import fixtures
from cadselect.cli import main as cli_main
from cadselect.errors import SelectionInfeasible
from cadselect.integral import NormalIntegrand, RadonMeasure, integrand_grid, verify_interchange
from cadselect.mappings import CoefficientFunction, IntersectedMapping, TimeGrid
from cadselect.oracle import dense_excess, dense_min, grid_distance
from cadselect.regularity import (
    ProbeCatalog,
    check_assumption1,
    check_regularity,
    check_right_isc,
    detect_discontinuity_sets,
)
from cadselect.selection import (
    castaing_family,
    castaing_targets,
    contraction_gaps,
    family_excess,
    family_values,
    membership_gap,
    michael_selection,
    projection_selection,
    refinement_schedule,
)

from helpers import KINDS, random_point, random_set, samples_of

N = 1000
TOL_GEOM, TOL_SEL, TOL_PROJ, TOL_INT = 1e-9, 1e-6, 1e-6, 1e-3
K = 6

BATTERY = ["shrinking_interval", "bounded_interval", "cadlag_interval", "constant_box",
           "step_mapping", "moving_ball"]
# every fixture with a cadlag representation
CADLAG = BATTERY + ["constant_ball", "moving_box", "sliding_interval", "unit_simplex"]
SPECS = os.path.join(os.path.dirname(__file__), os.pardir, "demos", "specs")


def criterion(number, title):
    return pytest.mark.criterion(number, title)


# 1 ---------------------------------------------------------------------------

@criterion(1, "characterization consistency on the battery")
def test_battery_checks_pass_and_family_is_dense():
    t0 = time.perf_counter()
    for name in BATTERY:
        m = getattr(fixtures, name)()
        grid = TimeGrid.for_mapping(m, N)
        report = check_regularity(m, grid)
        assert report.isc.passed, name
        assert report.vec_domain.passed, name
        assert report.assumption1.passed, name
        fam = castaing_family(m, castaing_targets(m, grid, K, d1=report.d1), TOL_SEL, report, grid)
        vals = family_values(fam)
        bound = 2 * 2.0**-K + m.lipschitz_bound() * m.horizon / N
        excess = family_excess(m, grid, vals)
        assert excess.shape == (len(grid),)
        assert np.max(excess) <= bound, (name, float(np.max(excess)), bound)
        # independent route: dense membership grid at a few nodes
        for j in (0, len(grid) // 3, len(grid) - 1):
            S = m.value(grid.times[j])
            step = 1e-3 if m.dimension == 1 else 1e-2
            assert dense_excess(S, vals[:, j, :], step) <= bound + step, (name, j)
    elapsed = time.perf_counter() - t0
    print(f"battery runtime {elapsed:.1f} s")
    assert elapsed < 60.0


# 2 ---------------------------------------------------------------------------

@pytest.fixture(scope="module")
def oscillator():
    m = fixtures.oscillating_singleton()
    grid = TimeGrid.for_mapping(m, N)
    return m, grid, check_regularity(m, grid)


@criterion(2, "negative control: oscillating singleton")
def test_oscillator_is_right_isc(oscillator):
    _, _, report = oscillator
    assert report.isc.passed


@criterion(2, "negative control: oscillating singleton")
def test_oscillator_has_no_left_limit_at_pi(oscillator):
    _, _, report = oscillator
    assert not report.vec_domain.passed
    assert [w["t"] for w in report.vec_domain.witnesses] == [np.pi]


@criterion(2, "negative control: oscillating singleton")
def test_oscillator_fails_assumption1_on_ball_of_radius_two(oscillator):
    m, _, _ = oscillator
    verdict = check_assumption1(m, ProbeCatalog(step=1.0, margin=0.0, radii=(2.0,)))
    assert not verdict.passed
    hits = [w for w in verdict.witnesses if w["center"] == [0.0] and w["radius"] == 2.0]
    assert hits and all(w["t"] == np.pi for w in hits)


@criterion(2, "negative control: oscillating singleton")
def test_oscillator_castaing_family_is_infeasible(oscillator):
    m, grid, report = oscillator
    targets = castaing_targets(m, grid, K, d1=report.d1)
    with pytest.raises(SelectionInfeasible):
        castaing_family(m, targets, TOL_SEL, report, grid)
    # without a report the family still refuses: no claim at pi
    with pytest.raises(SelectionInfeasible):
        castaing_family(m, targets, TOL_SEL, None, grid)


# 3 ---------------------------------------------------------------------------

@criterion(3, "successive refinement contracts and lands in the values")
@pytest.mark.parametrize("name", CADLAG)
def test_michael_contraction(checked, name):
    m, grid, report = checked(name)
    y, its = michael_selection(m, TOL_SEL, report, grid, return_iterates=True)
    eps = refinement_schedule(TOL_SEL)
    # iterate i is an eps_i-selection; the step to i + 1 stays in a 2 eps_i tube
    gaps = contraction_gaps(its)
    assert len(gaps) == len(eps) - 2
    for i, gap in enumerate(gaps, start=1):
        assert gap <= 2 * eps[i] + 1e-9, (i, gap)
    assert membership_gap(m, grid, y) <= TOL_SEL + 1e-9
    # brute-force distance at sampled nodes; a membership grid of step h
    # has a point within h * sqrt(d) of every point of a full-dimensional set
    step = 1e-3 if m.dimension == 1 else 2e-3
    slack = step * np.sqrt(m.dimension)
    for j in range(0, len(grid), 101):
        assert grid_distance(m.value(grid.times[j]), y.right[j], step) <= slack + TOL_SEL


# 4 ---------------------------------------------------------------------------

@criterion(4, "nearest-point selection laws at breakpoints")
@pytest.mark.parametrize("name", CADLAG)
def test_projection_selection_laws(name):
    m = getattr(fixtures, name)()
    grid = TimeGrid.for_mapping(m, N)
    rng = np.random.default_rng(4)
    L = m.lipschitz_bound()
    bps = [float(t) for t in m.breakpoints if t > 0]
    for x in rng.uniform(-3, 3, (20, m.dimension)):
        y = projection_selection(m, x, grid)
        for t in grid.times[grid.is_breakpoint]:
            j = grid.index_of(t)
            if t < m.horizon:
                # right-evaluated values do not jump: compare with the value just after t
                after = m.value(t + 1e-10).project(x)
                assert np.linalg.norm(y.right[j] - after) <= TOL_GEOM + L * 1e-10
                assert np.linalg.norm(y(t + 1e-12) - y.right[j]) <= TOL_GEOM
        for t in bps:
            j = grid.index_of(t)
            exact = m.left_limit(t).project(x)
            assert np.linalg.norm(y.left[j] - exact) <= TOL_PROJ
            # independent route: the value just before t
            before = m.value(t - 1e-10).project(x)
            assert np.linalg.norm(y.left[j] - before) <= TOL_PROJ + L * 1e-10


# 5 ---------------------------------------------------------------------------

def _pairs(count, dims, seed):
    rng = np.random.default_rng(seed)
    for i in range(count):
        d = dims[i % len(dims)]
        S = random_set(rng, d, KINDS[i % len(KINDS)])
        yield rng, S, random_point(rng, d)


@criterion(5, "geometry kernel laws")
def test_projection_laws_on_random_pairs():
    worst = {"idempotence": 0.0, "nonexpansive": 0.0, "variational": 0.0}
    for rng, S, x in _pairs(1000, (1, 2, 3), seed=5):
        p = S.project(x)
        worst["idempotence"] = max(worst["idempotence"], float(np.linalg.norm(S.project(p) - p)))
        z = random_point(rng, len(x))
        excess = np.linalg.norm(S.project(z) - p) - np.linalg.norm(z - x)
        worst["nonexpansive"] = max(worst["nonexpansive"], float(excess))
        Z = samples_of(S, rng, 16)
        worst["variational"] = max(worst["variational"], float(np.max((Z - p) @ (x - p))))
    print(worst)
    assert all(v <= TOL_GEOM for v in worst.values()), worst


@criterion(5, "geometry kernel laws")
def test_distance_agrees_with_dense_membership_grid():
    for _, S, x in _pairs(140, (1, 2), seed=55):
        step = 1e-4 if len(x) == 1 else 1e-2
        ref = grid_distance(S, x, step)
        got = float(S.distance(x))
        assert abs(ref - got) <= step + TOL_GEOM
        assert got <= ref + TOL_GEOM


# 6 ---------------------------------------------------------------------------

EXPECTED_JUMPS = dict(fixtures.DISCONTINUITY_SETS, unit_simplex=((), ()))


@criterion(6, "left-jump sets match hand-computed values")
@pytest.mark.parametrize("name", sorted(EXPECTED_JUMPS))
def test_discontinuity_sets(name):
    d1, d2 = detect_discontinuity_sets(getattr(fixtures, name)())
    assert (tuple(d1), tuple(d2)) == EXPECTED_JUMPS[name]


@criterion(6, "left-jump sets match hand-computed values")
def test_headline_jump_sets():
    assert detect_discontinuity_sets(fixtures.step_mapping())[0] == [0.5]
    assert detect_discontinuity_sets(fixtures.shrinking_interval())[0] == [1.0]


# 7 ---------------------------------------------------------------------------

def _interchange(h, mu, x0):
    grid = integrand_grid(h, mu, N)
    fam = [projection_selection(h.domain, np.asarray(x0, float), grid)]
    return verify_interchange(h, mu, fam, grid, TOL_INT), grid


@criterion(7, "integral and infimum interchange")
def test_tracking_with_feasible_target_has_zero_gap():
    S = fixtures.moving_box()
    h = NormalIntegrand("quadratic_tracking", S, target=CoefficientFunction.affine([0.5], [1.5]))
    rep, _ = _interchange(h, RadonMeasure.lebesgue(), [0.0])
    assert abs(rep.gap) <= 1e-9
    assert abs(rep.rhs) <= 1e-9
    assert rep.passed and rep.structural_ok


@criterion(7, "integral and infimum interchange")
@pytest.mark.parametrize("name", ["moving_box", "sliding_interval"])
def test_linear_over_moving_interval(name):
    S = getattr(fixtures, name)()
    h = NormalIntegrand("linear_on_domain", S, q=[1.0])
    rep, _ = _interchange(h, RadonMeasure.lebesgue(), [0.0])
    assert abs(rep.lhs - rep.rhs) <= TOL_INT * (1 + abs(rep.rhs))
    assert rep.rhs == pytest.approx(0.5, abs=1e-9)  # int_0^1 t dt
    assert rep.lhs >= rep.rhs - TOL_INT


@criterion(7, "integral and infimum interchange")
def test_atom_at_the_jump():
    S = fixtures.step_mapping()
    h = NormalIntegrand("quadratic_tracking", S, target=[0.0])
    mu = RadonMeasure([0.0, 1.0], [1.0], [(0.5, 1.0)])
    rep, grid = _interchange(h, mu, [0.0])
    j = grid.index_of(0.5)
    atom = 1.0 * rep.profile.right[j]
    assert abs(atom - 2.0) <= 1e-6
    # dense sampling of the value at the atom; its grid contains the nearest point 2
    ref = dense_min(lambda p: 0.5 * np.sum(p**2, axis=1), S.value(0.5), 1e-4)
    assert abs(ref - atom) <= 1e-6
    # Lebesgue part: 0 on [0, 0.5), 2 on [0.5, 1]
    assert rep.rhs == pytest.approx(1.0 + 2.0, abs=TOL_INT)
    assert rep.passed and rep.lhs >= rep.rhs - TOL_INT


@criterion(7, "integral and infimum interchange")
@pytest.mark.parametrize("seed", range(8))
def test_structural_bound_on_random_integrands(seed):
    rng = np.random.default_rng(700 + seed)
    kind = ("quadratic_tracking", "linear_on_domain", "indicator_plus")[seed % 3]
    name = CADLAG[seed % len(CADLAG)]
    S = getattr(fixtures, name)()
    d = S.dimension
    kw = {"quadratic_tracking": {"target": CoefficientFunction.affine(rng.normal(size=d), rng.normal(size=d))},
          "linear_on_domain": {"q": CoefficientFunction.affine(rng.normal(size=d), rng.normal(size=d))},
          "indicator_plus": {"Q": (lambda M: M @ M.T)(rng.normal(size=(d, d))), "p": rng.normal(size=d)}}[kind]
    h = NormalIntegrand(kind, S, **kw)
    mu = RadonMeasure([0.0, 0.5, 1.0], rng.uniform(0, 2, 2), [(float(rng.uniform(0, 1)), 1.0)])
    grid = integrand_grid(h, mu, 200)
    fam = [projection_selection(S, rng.normal(size=d), grid) for _ in range(3)]
    rep = verify_interchange(h, mu, fam, grid, TOL_INT)
    assert rep.lhs >= rep.rhs - TOL_INT
    assert rep.structural_ok


# 8 ---------------------------------------------------------------------------

PAIRS = [
    ("step_mapping", "moving_box", 0.5),
    ("constant_box", "moving_box", 0.05),
    ("bounded_interval", "cadlag_interval", 0.5),
    ("constant_box", "shrinking_interval", 1.5),
    ("sliding_interval", "moving_box", 0.1),
    ("bounded_interval", "step_mapping", 1.6),
    ("moving_ball", "constant_ball", 0.1),
    ("unit_simplex", "moving_ball", 0.2),
    ("constant_ball", "unit_simplex", 0.05),
    ("cadlag_interval", "sliding_interval", 0.2),
]


@criterion(8, "isc survives intersection with a fattened mapping")
@pytest.mark.parametrize("first,second,eps", PAIRS)
def test_intersection_stays_right_isc(first, second, eps):
    A, B = getattr(fixtures, first)(), getattr(fixtures, second)()
    M = IntersectedMapping(A, B, eps)
    grid = TimeGrid.for_mapping(M, N)
    for part in (A, B):
        assert check_right_isc(part, TimeGrid.for_mapping(part, N)).passed
    # full domain: every value, and every left limit, is nonempty
    M.sequence(grid.times).project(np.zeros((len(grid), M.dimension)))
    for t in M.breakpoints[M.breakpoints > 0]:
        assert M.left_limit(float(t)) is not None
    assert check_right_isc(M, grid).passed


# 9 ---------------------------------------------------------------------------

def _cli_runs(out):
    spec = lambda name: os.path.join(SPECS, name)  # noqa: E731
    return [
        ["check", spec("cadlag_interval.yaml"), "--out", os.path.join(out, "check")],
        ["check", spec("oscillating_singleton.yaml"), "--out", os.path.join(out, "check_osc")],
        ["select", spec("step_mapping.yaml"), "--out", os.path.join(out, "michael")],
        ["select", spec("moving_ball.yaml"), "--method", "epsilon", "--eps", "0.05",
         "--out", os.path.join(out, "epsilon")],
        ["select", spec("cadlag_interval.yaml"), "--method", "projection", "--point", "0.9",
         "--out", os.path.join(out, "projection")],
        ["castaing", spec("bounded_interval.yaml"), "--levels", "4", "--seed", "3",
         "--out", os.path.join(out, "castaing")],
        ["interchange", spec("tracking_step_atom.yaml"), "--out", os.path.join(out, "interchange")],
        ["oracle", spec("moving_box.yaml"), "--point", "0.25", "--grid", "50", "--out", os.path.join(out, "oracle")],
    ]


def _tree(root):
    files = []
    for dirpath, _, names in os.walk(root):
        files += [os.path.relpath(os.path.join(dirpath, n), root) for n in names]
    return sorted(files)


@criterion(9, "identical runs give byte-identical outputs")
def test_runs_are_byte_identical(tmp_path, monkeypatch, capsys):
    first, second = str(tmp_path / "a"), str(tmp_path / "b")
    # first run in-process, single thread
    monkeypatch.setenv("CADSELECT_THREADS", "1")
    codes_a = [cli_main(argv) for argv in _cli_runs(first)]
    capsys.readouterr()
    # second run in a fresh interpreter with a different thread cap
    env = dict(os.environ, CADSELECT_THREADS="4")
    codes_b = [subprocess.run([sys.executable, "-m", "cadselect", *argv], env=env,
                              capture_output=True).returncode for argv in _cli_runs(second)]
    assert codes_a == codes_b == [0, 2, 0, 0, 0, 0, 0, 0]
    files = _tree(first)
    assert files == _tree(second) and len(files) > 10
    _, mismatch, errors = filecmp.cmpfiles(first, second, files, shallow=False)
    assert not mismatch and not errors, mismatch + errors
