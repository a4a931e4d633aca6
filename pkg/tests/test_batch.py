import numpy as np
import pytest
from hypothesis import given, strategies as st

from cadselect.batch import SetSequence
from cadselect.errors import EmptyValue
from cadselect.geometry import Ball, Box, intersect

from helpers import KINDS, random_set


@given(st.integers(0, 2**32 - 1), st.integers(1, 3))
def test_stacked_projection_matches_per_set(seed, d):
    rng = np.random.default_rng(seed)
    sets = [random_set(rng, d, KINDS[rng.integers(len(KINDS))]) for _ in range(12)]
    seq = SetSequence.from_sets(sets)
    pts = rng.uniform(-3, 3, (12, d))
    got = seq.project(pts)
    ref = np.array([S.project(p) for S, p in zip(sets, pts)])
    assert np.allclose(got, ref, atol=1e-8)


def test_two_balls_and_a_box_use_the_vectorised_path():
    S = intersect(Box([-1, -1], [1, 0.5]), Ball([0, 0], 1), Ball([0.5, 0], 1))
    seq = SetSequence.from_sets([S])
    assert not seq.objects
    p = seq.project(np.array([[3.0, 3.0]]))[0]
    assert p[1] <= 0.5 + 1e-9
    assert np.linalg.norm(p) <= 1 + 1e-9 and np.linalg.norm(p - [0.5, 0]) <= 1 + 1e-9
    # variational inequality against samples of the set
    rng = np.random.default_rng(0)
    Z = np.array([S.project(z) for z in rng.uniform(-2, 2, (200, 2))])
    assert np.max((Z - p) @ ([3.0, 3.0] - p)) <= 1e-8


def test_intersect_ball_by_node_and_mask():
    seq = SetSequence.from_sets([Box([0.0, 0.0], [1.0, 1.0])] * 3)
    out = seq.intersect_ball(np.zeros(2), 0.5, mask=[True, False, True])
    p = out.project(np.ones((3, 2)))
    assert np.allclose(p[1], [1, 1])
    assert np.allclose(p[0], [0.5 / np.sqrt(2)] * 2)


def test_one_dimensional_intersect_ball_stays_interval():
    seq = SetSequence.from_sets([Box([0.0], [1.0]), Box([2.0], [3.0])])
    out = seq.intersect_ball(np.array([[0.9], [2.2]]), 0.25)
    assert np.allclose(out.lower[:, 0], [0.65, 2.0]) and np.allclose(out.upper[:, 0], [1.0, 2.45])
    with pytest.raises(EmptyValue):
        seq.intersect_ball(np.array([5.0]), 0.25)


def test_replace_and_set_at_round_trip():
    seq = SetSequence.from_sets([Ball([0.0, 0.0], 1.0)] * 2)
    new = seq.replace(1, Box([2.0, 2.0], [2.0, 2.0]))
    assert np.allclose(new.project(np.zeros((2, 2))), [[0, 0], [2, 2]])
    assert isinstance(new.set_at(0), Ball)
    assert np.allclose(seq.project(np.zeros((2, 2)))[1], [0, 0])


def test_distance_indexing():
    seq = SetSequence.from_sets([Ball([0.0], 1.0), Ball([5.0], 1.0)])
    d = seq.distance(np.array([[3.0], [3.0], [3.0]]), np.array([0, 1, 1]))
    assert np.allclose(d, [2.0, 1.0, 1.0])
