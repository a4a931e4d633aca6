"""Brute-force references built from membership tests only.

Nothing here calls a projection kernel, so agreement with the kernels is
a genuine second opinion.
"""

import numpy as np

from .geometry import Ball, Box, HPolytope, Intersection


def membership(S, pts, tol=1e-12):
    """Boolean membership of each row of ``pts`` in ``S``."""
    pts = np.atleast_2d(pts)
    if isinstance(S, Ball):
        return np.linalg.norm(pts - S.center, axis=1) <= S.radius + tol
    if isinstance(S, (Box, HPolytope)):
        A, b = S.halfspaces()
        return np.all(pts @ A.T <= b + tol, axis=1)
    if isinstance(S, Intersection):
        return np.all([membership(M, pts, tol) for M in S.members], axis=0)
    raise TypeError(f"no membership oracle for {type(S).__name__}")


def dense_points(S, step):
    """Grid points of step ``step`` that lie in ``S`` (plus nothing else)."""
    lo, hi = S.bounding_box()
    axes = [np.arange(a, b + 0.5 * step, step) if b > a else np.array([a]) for a, b in zip(lo, hi)]
    axes = [np.append(ax[ax <= b], b) if ax[-1] < b else ax for ax, b in zip(axes, hi)]
    pts = np.array(np.meshgrid(*axes, indexing="ij")).reshape(len(axes), -1).T
    return pts[membership(S, pts)]


def grid_distance(S, x, step=1e-3):
    """``min |x - p|`` over the dense grid points of ``S``.

    Overestimates the true distance by at most ``step * sqrt(d) / 2`` for
    full-dimensional sets.
    """
    pts = dense_points(S, step)
    if len(pts) == 0:
        raise ValueError("grid too coarse: no point of the set found")
    return float(np.min(np.linalg.norm(pts - np.asarray(x, float), axis=1)))


def dense_excess(S, values, step=1e-2):
    """One-sided excess of ``S`` over ``values``, sampled on the dense grid of ``S``."""
    pts = dense_points(S, step)
    values = np.atleast_2d(values)
    best = np.full(len(pts), np.inf)
    for v in values:
        best = np.minimum(best, np.linalg.norm(pts - v, axis=1))
    return float(best.max())


def dense_min(fun, S, step=1e-3):
    """``min fun(p)`` over dense grid points of ``S`` (vectorised ``fun``)."""
    pts = dense_points(S, step)
    return float(np.min(fun(pts)))


def distance_profile(mapping, times, x, step=1e-3):
    """Brute-force distance from ``x`` to the value at each time."""
    return np.array([grid_distance(mapping.value(t), x, step) for t in times])
