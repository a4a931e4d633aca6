"""Vectorised projections onto one convex set per time node.

Selections and regularity checks project thousands of points onto the
values of a mapping along a time grid. ``SetSequence`` stores those values
as stacked arrays (a box plus up to two balls per node) so the common
families are handled by whole-array kernels. Nodes that do not fit the
layout keep their ``ConvexSet`` object and are projected one by one.
"""

import numpy as np

from .errors import EmptyValue
from .geometry import (
    Ball,
    Box,
    ConvexSet,
    Intersection,
    TOL_GEOM,
    intersect,
    project_ball_ball,
    project_box_ball,
)

MAX_BALLS = 2


def _split(S):
    """Box bounds and ball list of ``S`` if it fits the stacked layout."""
    d = S.dim
    if isinstance(S, Box):
        return S.lower, S.upper, []
    if isinstance(S, Ball):
        return np.full(d, -np.inf), np.full(d, np.inf), [S]
    if isinstance(S, Intersection):
        lo, hi, balls = np.full(d, -np.inf), np.full(d, np.inf), []
        for M in S.members:
            if isinstance(M, Box):
                lo, hi = np.maximum(lo, M.lower), np.minimum(hi, M.upper)
            elif isinstance(M, Ball):
                balls.append(M)
            else:
                return None
        if len(balls) <= MAX_BALLS:
            return lo, hi, balls
    return None


class SetSequence:
    """One convex set per node, stored for vectorised projection.

    Attributes
    ----------
    lower, upper : ndarray, shape (n, d)
        Box part, infinite where absent.
    centers : ndarray, shape (n, 2, d)
    radii : ndarray, shape (n, 2)
        Ball slots; an infinite radius marks an unused slot.
    objects : dict
        Node index to ``ConvexSet`` for nodes outside the stacked layout.
    """

    def __init__(self, lower, upper, centers, radii, objects):
        self.lower, self.upper = lower, upper
        self.centers, self.radii = centers, radii
        self.objects = objects
        self.n, self.dim = lower.shape

    @classmethod
    def from_sets(cls, sets):
        n, d = len(sets), sets[0].dim
        lower = np.full((n, d), -np.inf)
        upper = np.full((n, d), np.inf)
        centers = np.zeros((n, MAX_BALLS, d))
        radii = np.full((n, MAX_BALLS), np.inf)
        objects = {}
        for i, S in enumerate(sets):
            parts = _split(S)
            if parts is None:
                objects[i] = S
                continue
            lower[i], upper[i], balls = parts
            for k, B in enumerate(balls):
                centers[i, k], radii[i, k] = B.center, B.radius
        if np.any(lower > upper):
            bad = int(np.flatnonzero(np.any(lower > upper, axis=1))[0])
            raise EmptyValue(f"empty box at node {bad}", t=bad)
        return cls(lower, upper, centers, radii, objects)

    @classmethod
    def from_arrays(cls, lower, upper, centers=None, radii=None, objects=None):
        n, d = lower.shape
        if centers is None:
            centers = np.zeros((n, MAX_BALLS, d))
            radii = np.full((n, MAX_BALLS), np.inf)
        return cls(lower, upper, centers, radii, dict(objects or {}))

    def __len__(self):
        return self.n

    def set_at(self, i) -> ConvexSet:
        """The node's value as a ``ConvexSet``."""
        if i in self.objects:
            return self.objects[i]
        members = []
        if np.any(np.isfinite(self.lower[i]) | np.isfinite(self.upper[i])):
            members.append(Box(self.lower[i], self.upper[i]))
        for k in range(MAX_BALLS):
            if np.isfinite(self.radii[i, k]):
                members.append(Ball(self.centers[i, k], self.radii[i, k]))
        return intersect(*members) if len(members) > 1 else members[0]

    def subset(self, idx):
        idx = np.asarray(idx)
        objects = {j: self.objects[i] for j, i in enumerate(idx) if i in self.objects}
        return SetSequence(self.lower[idx], self.upper[idx], self.centers[idx],
                           self.radii[idx], objects)

    def replace(self, i, S):
        """Copy with node ``i`` set to ``S``."""
        out = self.subset(np.arange(self.n))
        parts = _split(S)
        out.objects.pop(i, None)
        if parts is None:
            out.objects[i] = S
            return out
        out.lower[i], out.upper[i], balls = parts
        out.radii[i] = np.inf
        for k, B in enumerate(balls):
            out.centers[i, k], out.radii[i, k] = B.center, B.radius
        return out

    def intersect_ball(self, center, radius, mask=None):
        """Copy with the closed ball ``(center, radius)`` added at masked nodes.

        ``center`` may be one point or one point per node.
        """
        mask = np.ones(self.n, bool) if mask is None else np.asarray(mask, bool)
        center = np.broadcast_to(np.asarray(center, float), (self.n, self.dim))
        out = self.subset(np.arange(self.n))
        if self.dim == 1 and not self.objects:
            # an interval meets an interval in an interval
            rows = np.flatnonzero(mask)
            out.lower[rows] = np.maximum(out.lower[rows], center[rows] - radius)
            out.upper[rows] = np.minimum(out.upper[rows], center[rows] + radius)
            if np.any(out.lower > out.upper):
                raise EmptyValue("ball misses the interval at some node")
            return out
        free = np.isinf(out.radii)
        is_obj = np.zeros(self.n, bool)
        is_obj[list(out.objects)] = True
        rows = np.flatnonzero(mask & ~is_obj & np.any(free, axis=1))
        slot = np.argmax(free[rows], axis=1)
        out.centers[rows, slot] = center[rows]
        out.radii[rows, slot] = radius
        for i in np.flatnonzero(mask & (is_obj | ~np.any(free, axis=1))):
            base = out.objects[i] if i in out.objects else self.set_at(i)
            out.objects[i] = intersect(base, Ball(center[i], radius))
        return out

    def project(self, points, index=None):
        """Project ``points[j]`` onto the set of node ``index[j]``.

        Parameters
        ----------
        points : ndarray, shape (k, d)
        index : ndarray of int, shape (k,), optional
            Defaults to ``arange(n)`` (one point per node).

        Raises
        ------
        EmptyValue
            If a node's set is empty.
        """
        points = np.atleast_2d(np.asarray(points, float))
        index = np.arange(self.n) if index is None else np.asarray(index)
        lo, hi = self.lower[index], self.upper[index]
        C, R = self.centers[index], self.radii[index]
        nballs = np.sum(np.isfinite(R), axis=1)
        boxed = np.any(np.isfinite(lo) | np.isfinite(hi), axis=1)
        is_obj = np.array([i in self.objects for i in index.tolist()], bool) if self.objects \
            else np.zeros(len(index), bool)
        out = np.clip(points, lo, hi)

        sel = ~is_obj & (nballs == 1)
        if np.any(sel):
            k = np.argmax(np.isfinite(R[sel]), axis=1)
            rows = np.flatnonzero(sel)
            c, r = C[rows, k], R[rows, k]
            plain = ~boxed[rows]
            v = points[rows[plain]] - c[plain]
            nv = np.linalg.norm(v, axis=1)
            s = np.where(nv > r[plain], r[plain] / np.where(nv > 0, nv, 1.0), 1.0)
            out[rows[plain]] = c[plain] + v * s[:, None]
            if np.any(~plain):
                rb = rows[~plain]
                out[rb] = project_box_ball(points[rb], lo[rb], hi[rb], c[~plain], r[~plain])

        sel = ~is_obj & (nballs == 2) & ~boxed
        if np.any(sel):
            rows = np.flatnonzero(sel)
            out[rows] = project_ball_ball(points[rows], C[rows, 0], R[rows, 0], C[rows, 1], R[rows, 1])

        sel = ~is_obj & (nballs == 2) & boxed
        if np.any(sel):
            rows = np.flatnonzero(sel)
            out[rows] = self._dykstra3(points[rows], lo[rows], hi[rows], C[rows], R[rows])

        for j in np.flatnonzero(is_obj):
            out[j] = self.objects[int(index[j])].project(points[j])
        return out

    @staticmethod
    def _dykstra3(x, lo, hi, C, R, tol=TOL_GEOM, max_sweeps=100_000):
        """Dykstra over box and two balls, vectorised across rows."""
        from .errors import NonConvergence

        def ball(z, c, r):
            v = z - c
            n = np.linalg.norm(v, axis=1)
            s = np.where(n > r, r / np.where(n > 0, n, 1.0), 1.0)
            return c + v * s[:, None]

        projs = [lambda z: np.clip(z, lo, hi),
                 lambda z: ball(z, C[:, 0], R[:, 0]),
                 lambda z: ball(z, C[:, 1], R[:, 1])]
        z = x.copy()
        incs = [np.zeros_like(x) for _ in projs]
        for _ in range(max_sweeps):
            change = np.zeros(len(x))
            for i, P in enumerate(projs):
                y = P(z + incs[i])
                new = z + incs[i] - y
                change += np.sum((new - incs[i]) ** 2, axis=1)
                incs[i], z = new, y
            if np.all(change < tol * tol):
                gap = max(np.max(np.linalg.norm(P(z) - z, axis=1)) for P in projs)
                if gap <= tol:
                    return z
        raise NonConvergence("batched Dykstra did not converge")

    def distance(self, points, index=None):
        points = np.atleast_2d(np.asarray(points, float))
        return np.linalg.norm(points - self.project(points, index), axis=1)
