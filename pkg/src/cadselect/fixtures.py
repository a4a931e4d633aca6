"""Ready-made mappings with known regularity behaviour.

Each builder returns a fresh ``SetValuedMapping``. The table below lists
the facts the test-suite relies on (``d1``/``d2`` are the left-jump sets).

=======================  =====================================  ==========  ==========
builder                  value                                  d1          d2
=======================  =====================================  ==========  ==========
constant_box             [0, 1]                                 {}          {}
constant_ball            closed unit ball in the plane          {}          {}
step_mapping             [0, 1] then [2, 3] from 0.5            {0.5}       {0.5}
left_continuous_step     step, but [0, 1] at 0.5                (not right inner semicontinuous)
shrinking_interval       [0, 1 - t], then {2} at 1              {1}         {1}
oscillating_singleton    {sin(1 / (pi - t))}, then {2} at pi    (no left limit at pi)
bounded_interval         [0, f] with f right-continuous, > 0    {}          {0.5}
interval_mapping         [g, f] with cadlag g <= f              {0.7}       {0.4}
moving_ball              small disc drifting right              {}          {}
moving_box               [t, t + 1]                             {}          {}
sliding_interval         [t, t + 1] built from coefficients     {}          {}
=======================  =====================================  ==========  ==========
"""

import numpy as np

from .geometry import Box
from .mappings import CoefficientFunction, Piece, SetValuedMapping


def _box_piece(start, end, lo0, hi0, lo1=None, hi1=None):
    lo1 = lo0 if lo1 is None else lo1
    hi1 = hi0 if hi1 is None else hi1
    return Piece(start, end, "box",
                 {"lower": np.atleast_1d(lo0), "upper": np.atleast_1d(hi0)},
                 {"lower": np.atleast_1d(lo1), "upper": np.atleast_1d(hi1)})


def constant_box(lower=0.0, upper=1.0, horizon=1.0):
    return SetValuedMapping(1, horizon, [_box_piece(0.0, horizon, lower, upper)], name="constant_box")


def constant_ball(center=(0.0, 0.0), radius=1.0, horizon=1.0):
    c = np.asarray(center, float)
    piece = Piece(0.0, horizon, "ball", {"center": c, "radius": radius})
    return SetValuedMapping(len(c), horizon, [piece], name="constant_ball")


def step_mapping():
    """[0, 1] on [0, 0.5) and [2, 3] on [0.5, 1]."""
    return SetValuedMapping(1, 1.0, [_box_piece(0.0, 0.5, 0.0, 1.0),
                                     _box_piece(0.5, 1.0, 2.0, 3.0)], name="step_mapping")


def left_continuous_step():
    """Step mapping whose value at the jump is the left piece's value."""
    m = step_mapping()
    return SetValuedMapping(1, 1.0, m.pieces, {0.5: Box([0.0], [1.0])}, name="left_continuous_step")


def shrinking_interval():
    """[0, 1 - t] for t < 1 and the isolated value {2} at t = 1."""
    return SetValuedMapping(1, 1.0, [_box_piece(0.0, 1.0, 0.0, 1.0, 0.0, 0.0)],
                            {1.0: Box([2.0], [2.0])}, name="shrinking_interval")


def oscillating_singleton():
    """{sin(1 / (pi - t))} on [0, pi) and {2} at pi."""
    piece = Piece(0.0, np.pi, "oscillator", {"offset": [0.0], "direction": [1.0]})
    return SetValuedMapping(1, np.pi, [piece], {np.pi: Box([2.0], [2.0])},
                            name="oscillating_singleton")


def interval_mapping(g, f, name="interval_mapping"):
    """``t -> [g(t), f(t)]`` for cadlag piecewise-affine coefficient functions.

    Raises ``EmptyValue`` if ``g > f`` anywhere (checked at the merged
    breakpoints, which suffices for affine pieces).
    """
    if g.horizon != f.horizon:
        raise ValueError("coefficient functions need the same horizon")
    T = g.horizon
    bps = np.union1d(g.breakpoints, f.breakpoints)
    pieces = []
    for a, b in zip(bps[:-1], bps[1:]):
        pieces.append(_box_piece(a, b, g(a), f(a), g.left_limit(b), f.left_limit(b)))
    overrides = {}
    if not np.allclose(g.terminal, g.left_values[-1]) or not np.allclose(f.terminal, f.left_values[-1]):
        overrides[T] = Box(np.atleast_1d(g.terminal), np.atleast_1d(f.terminal))
    return SetValuedMapping(1, T, pieces, overrides, name=name)


def bounded_interval(f=None):
    """``[0, f(t)]`` with ``f`` right-continuous and positive.

    The default ``f`` rises as ``1 + t`` and drops to ``0.5`` at ``t = 0.5``.
    """
    if f is None:
        f = CoefficientFunction([0.0, 0.5, 1.0], [1.0, 0.5], [1.5, 0.5])
    zero = CoefficientFunction.constant(0.0, f.horizon)
    return interval_mapping(zero, f, name="bounded_interval")


def cadlag_interval():
    """``[g, f]`` with jumps of both bounds: g up at 0.4, f up at 0.7."""
    g = CoefficientFunction([0.0, 0.4, 1.0], [0.0, 0.8], [0.4, 0.8])
    f = CoefficientFunction([0.0, 0.7, 1.0], [1.0, 1.8], [1.7, 1.5])
    return interval_mapping(g, f, name="cadlag_interval")


def sliding_interval():
    """``[t, t + 1]`` on [0, 1] built from coefficient functions."""
    g = CoefficientFunction.affine(0.0, 1.0)
    f = CoefficientFunction.affine(1.0, 2.0)
    return interval_mapping(g, f, name="sliding_interval")


def moving_box():
    """``[t, t + 1]`` on [0, 1] as a single box piece."""
    return SetValuedMapping(1, 1.0, [_box_piece(0.0, 1.0, 0.0, 1.0, 1.0, 2.0)], name="moving_box")


def moving_ball(start=(0.0, 0.0), end=(0.25, 0.0), radius=0.125):
    """Disc of fixed radius whose centre moves affinely over [0, 1]."""
    piece = Piece(0.0, 1.0, "ball", {"center": np.asarray(start, float), "radius": radius},
                  {"center": np.asarray(end, float), "radius": radius})
    return SetValuedMapping(2, 1.0, [piece], name="moving_ball")


def unit_simplex(horizon=1.0):
    """Constant triangle ``{x >= 0, x1 + x2 <= 1}`` as an H-polytope piece."""
    piece = Piece(0.0, horizon, "hpolytope",
                  {"normals": [[1.0, 1.0]], "offsets": [1.0], "lower": [0.0, 0.0], "upper": [1.0, 1.0]})
    return SetValuedMapping(2, horizon, [piece], name="unit_simplex")


def characterization_battery():
    """Mappings that admit a cadlag representation, by name."""
    return {
        "shrinking_interval": shrinking_interval(),
        "bounded_interval": bounded_interval(),
        "cadlag_interval": cadlag_interval(),
        "constant_box": constant_box(),
        "step_mapping": step_mapping(),
        "moving_ball": moving_ball(),
    }


# hand-computed left-jump sets (d1, d2)
DISCONTINUITY_SETS = {
    "constant_box": ((), ()),
    "constant_ball": ((), ()),
    "step_mapping": ((0.5,), (0.5,)),
    "shrinking_interval": ((1.0,), (1.0,)),
    "bounded_interval": ((), (0.5,)),
    "cadlag_interval": ((0.7,), (0.4,)),
    "moving_ball": ((), ()),
    "moving_box": ((), ()),
    "sliding_interval": ((), ()),
}
