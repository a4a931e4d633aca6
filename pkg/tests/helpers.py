"""Random convex sets for property tests."""

import numpy as np

from cadselect.geometry import Ball, Box, HPolytope, intersect

KINDS = ("box", "flat_box", "ball", "polytope", "box_ball", "ball_ball", "polytope_ball")


def random_polytope(rng, d, k=None):
    # evenly spread normals keep every corner angle obtuse in the plane
    k = k or int(rng.integers(d + 2, 2 * d + 4))
    if d == 2:
        ang = np.sort(rng.uniform(0, 2 * np.pi / k, 1) + 2 * np.pi * np.arange(k) / k)
        N = np.column_stack([np.cos(ang), np.sin(ang)])
    else:
        N = rng.normal(size=(k, d))
        N /= np.linalg.norm(N, axis=1, keepdims=True)
    c = rng.uniform(-0.5, 0.5, d)
    off = N @ c + rng.uniform(0.5, 1.0, k)
    return HPolytope(N, off, c - 1.5, c + 1.5)


def random_set(rng, d, kind=None):
    kind = kind or KINDS[rng.integers(len(KINDS))]
    c = rng.uniform(-1, 1, d)
    if kind == "box":
        return Box(c - rng.uniform(0.2, 1, d), c + rng.uniform(0.2, 1, d))
    if kind == "flat_box":
        lo, hi = c - rng.uniform(0.2, 1, d), c + rng.uniform(0.2, 1, d)
        hi[rng.integers(d)] = lo[rng.integers(d)] = c[0] if d == 1 else lo[0]
        lo, hi = np.minimum(lo, hi), np.maximum(lo, hi)
        return Box(lo, hi)
    if kind == "ball":
        return Ball(c, rng.uniform(0.2, 1.5))
    if kind == "polytope":
        return random_polytope(rng, d)
    if kind == "box_ball":
        return intersect(Box(c - rng.uniform(0.3, 1, d), c + rng.uniform(0.3, 1, d)),
                         Ball(c + rng.uniform(-0.2, 0.2, d), rng.uniform(0.4, 1.2)))
    if kind == "ball_ball":
        r1, r2 = rng.uniform(0.5, 1.2, 2)
        u = rng.normal(size=d)
        u /= np.linalg.norm(u)
        return intersect(Ball(c, r1), Ball(c + u * rng.uniform(0, 0.8) * (r1 + r2) / 2, r2))
    if kind == "polytope_ball":
        P = random_polytope(rng, d)
        return intersect(P, Ball(P.feasible_point, rng.uniform(0.4, 1.0)))
    raise ValueError(kind)


def random_point(rng, d, scale=3.0):
    return rng.uniform(-scale, scale, d)


def samples_of(S, rng, k=32):
    return np.vstack([S.sample(rng, k)] + ([S.extreme_points()] if hasattr(S, "normals") or isinstance(S, Box) else []))
