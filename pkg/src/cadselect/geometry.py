"""Closed convex sets in R^d: projection, distance, support, containment.

Three parametric families (``Box``, ``Ball``, ``HPolytope``) plus two lazy
composites (``Intersection``, ``Fattened``) that arise when selections are
refined inside tubes. Every set exposes the same small interface so that the
rest of the package never needs to know which family it is holding.

Notes
-----
Projection onto an H-polytope or a general intersection runs Dykstra's
alternating projections. Two pairs that show up constantly (box with ball,
ball with ball) have exact kernels that bypass the iteration.
"""

from collections import namedtuple
from itertools import combinations, product
from math import comb

import numpy as np

from .errors import EmptyValue, NonConvergence, Unsupported
from .lp import LPInfeasible, linprog_max

TOL_GEOM = 1e-9
MAX_SWEEPS = 100_000
MAX_VERTICES = 256

Containment = namedtuple("Containment", ["contained", "witness"])


def _vec(x):
    return np.asarray(x, dtype=float)


def direction_catalog(dim):
    """Fixed unit directions used to probe round sets.

    The coordinate directions and their negatives, plus the normalised
    sign vectors when ``dim <= 3``.
    """
    eye = np.eye(dim)
    dirs = [eye, -eye]
    if 1 < dim <= 3:
        signs = np.array(list(product((-1.0, 1.0), repeat=dim)))
        dirs.append(signs / np.sqrt(dim))
    return np.vstack(dirs)


class ConvexSet:
    """Nonempty closed convex subset of R^d.

    Subclasses implement ``project`` and ``support``; everything else has
    a generic fallback built from those two.
    """

    dim: int

    def project(self, x):
        """Metric projection of a point (or a stack of points, shape (k, d))."""
        raise NotImplementedError

    def distance(self, x):
        x = _vec(x)
        return np.linalg.norm(x - self.project(x), axis=-1)

    def contains(self, x, tol=TOL_GEOM):
        return bool(np.all(self.distance(x) <= tol))

    def support(self, a):
        """Support function ``max_{x in S} a.x``."""
        raise NotImplementedError

    def support_point(self, a):
        raise NotImplementedError

    def extreme_points(self):
        """Extreme points for polyhedral sets, a direction sample otherwise."""
        dirs = direction_catalog(self.dim)
        return np.array([self.support_point(u) for u in dirs])

    def bounding_box(self):
        eye = np.eye(self.dim)
        hi = np.array([self.support(e) for e in eye])
        lo = np.array([-self.support(-e) for e in eye])
        return lo, hi

    def halfspaces(self):
        """Rows ``(A, b)`` with ``S = {x : A x <= b}``, or None if not polyhedral."""
        return None

    def sample(self, rng, k):
        """``k`` points of the set: projections of uniform draws from an inflated box."""
        lo, hi = self.bounding_box()
        pad = 0.25 * np.maximum(hi - lo, 1.0)
        raw = rng.uniform(lo - pad, hi + pad, size=(k, self.dim))
        return np.array([self.project(p) for p in raw])


class Box(ConvexSet):
    """Axis-aligned box ``{x : lower <= x <= upper}``; flat sides are allowed."""

    def __init__(self, lower, upper):
        self.lower = np.atleast_1d(_vec(lower)).copy()
        self.upper = np.atleast_1d(_vec(upper)).copy()
        if self.lower.shape != self.upper.shape:
            raise ValueError("lower and upper bounds differ in shape")
        if np.any(self.lower > self.upper):
            raise EmptyValue(f"box with lower > upper: {self.lower} > {self.upper}")
        self.dim = self.lower.size

    def __repr__(self):
        return f"Box({self.lower.tolist()}, {self.upper.tolist()})"

    def project(self, x):
        return np.clip(_vec(x), self.lower, self.upper)

    def support(self, a):
        a = _vec(a)
        return float(np.sum(np.where(a > 0, a * self.upper, a * self.lower)))

    def support_point(self, a):
        return np.where(_vec(a) > 0, self.upper, self.lower)

    def extreme_points(self):
        corners = np.array(list(product((0, 1), repeat=self.dim)), dtype=bool)
        pts = np.where(corners, self.upper, self.lower)
        return np.unique(pts, axis=0)

    def bounding_box(self):
        return self.lower.copy(), self.upper.copy()

    def halfspaces(self):
        eye = np.eye(self.dim)
        return np.vstack([eye, -eye]), np.concatenate([self.upper, -self.lower])


class Ball(ConvexSet):
    """Closed Euclidean ball; radius zero gives a singleton."""

    def __init__(self, center, radius):
        self.center = np.atleast_1d(_vec(center)).copy()
        self.radius = float(radius)
        if self.radius < 0:
            raise EmptyValue(f"ball with negative radius {self.radius}")
        self.dim = self.center.size

    def __repr__(self):
        return f"Ball({self.center.tolist()}, {self.radius})"

    def project(self, x):
        x = _vec(x)
        v = x - self.center
        n = np.linalg.norm(v, axis=-1, keepdims=True)
        scale = np.where(n > self.radius, self.radius / np.where(n > 0, n, 1.0), 1.0)
        return self.center + v * scale

    def distance(self, x):
        return np.maximum(np.linalg.norm(_vec(x) - self.center, axis=-1) - self.radius, 0.0)

    def support(self, a):
        a = _vec(a)
        return float(a @ self.center + self.radius * np.linalg.norm(a))

    def support_point(self, a):
        a = _vec(a)
        n = np.linalg.norm(a)
        return self.center.copy() if n == 0 else self.center + self.radius * a / n

    def bounding_box(self):
        return self.center - self.radius, self.center + self.radius


def _halfspace_projector(a, b):
    aa = float(a @ a)

    def proj(x):
        excess = a @ x - b
        return x - (excess / aa) * a if excess > 0 else x

    return proj


class HPolytope(ConvexSet):
    """Bounded polytope ``{x : A x <= b}`` intersected with a bounding box.

    Parameters
    ----------
    normals : array_like, shape (m, d)
    offsets : array_like, shape (m,)
    lower, upper : array_like, shape (d,)
        Bounding box. Its rows are appended to ``(A, b)`` so the set is
        bounded by construction.

    Raises
    ------
    EmptyValue
        If the constraints admit no point. A feasible point (the Chebyshev
        centre) is stored as a certificate otherwise.
    """

    def __init__(self, normals, offsets, lower, upper):
        normals = np.atleast_2d(_vec(normals))
        offsets = np.atleast_1d(_vec(offsets))
        self.box = Box(lower, upper)
        self.dim = self.box.dim
        if normals.size == 0:
            normals = np.zeros((0, self.dim))
        if normals.shape != (offsets.size, self.dim):
            raise ValueError("normals must have shape (len(offsets), dim)")
        keep = np.linalg.norm(normals, axis=1) > 0
        if np.any(offsets[~keep] < 0):
            raise EmptyValue("zero constraint row with negative offset")
        self.normals = normals[keep]
        self.offsets = offsets[keep]
        bA, bb = self.box.halfspaces()
        self.A = np.vstack([self.normals, bA])
        self.b = np.concatenate([self.offsets, bb])
        self.feasible_point, self.inradius = self._chebyshev()

    def __repr__(self):
        return f"HPolytope({self.normals.tolist()}, {self.offsets.tolist()}, box={self.box!r})"

    def _chebyshev(self):
        # shift x = lower + z so that z >= 0 matches the LP standard form
        lo = self.box.lower
        norms = np.linalg.norm(self.A, axis=1)
        A = np.hstack([self.A, norms[:, None]])
        b = self.b - self.A @ lo
        c = np.zeros(self.dim + 1)
        c[-1] = 1.0
        try:
            z, r = linprog_max(c, A, b)
        except LPInfeasible:
            raise EmptyValue("polytope constraints are infeasible") from None
        return lo + z[:-1], max(r, 0.0)

    def halfspaces(self):
        return self.A.copy(), self.b.copy()

    def bounding_box(self):
        return self.box.bounding_box()

    def support_point(self, a):
        lo = self.box.lower
        z, _ = linprog_max(_vec(a), self.A, self.b - self.A @ lo)
        return lo + z

    def support(self, a):
        return float(_vec(a) @ self.support_point(a))

    def extreme_points(self):
        return enumerate_vertices(self.A, self.b)

    def _polish(self, x, p, slack=1e-7):
        """Exact projection by an active-set solve of the KKT system.

        Starts from the rows within ``slack`` of active at the guess ``p``,
        then drops rows with negative multipliers and adds the most
        violated row until the candidate is feasible. Returns None if the
        active set does not settle.
        """
        A, b = self.A, self.b
        active = A @ p > b - slack
        for _ in range(2 * len(b) + 2):
            rows = np.flatnonzero(active)
            if rows.size == 0:
                q, lam = x, np.zeros(0)
            else:
                Aj = A[rows]
                G, r = Aj @ Aj.T, Aj @ x - b[rows]
                if rows.size <= self.dim:
                    try:
                        lam = np.linalg.solve(G, r)
                    except np.linalg.LinAlgError:
                        lam = np.linalg.lstsq(G, r, rcond=None)[0]
                else:
                    # more active rows than dimensions: degenerate vertex
                    lam = np.linalg.lstsq(G, r, rcond=None)[0]
                q = x - Aj.T @ lam
            if lam.size and lam.min() < -1e-12:
                active[rows[np.argmin(lam)]] = False
                continue
            viol = A @ q - b
            worst = int(np.argmax(viol))
            if viol[worst] <= TOL_GEOM * 1e-2:
                return q
            if active[worst]:
                return None
            active[worst] = True
        return None

    def project(self, x):
        x = _vec(x)
        if x.ndim == 2:
            return np.array([self.project(row) for row in x])
        if np.all(self.A @ x <= self.b):
            return x.copy()
        p = self._polish(x, x, slack=0.0)
        if p is not None:
            return p
        projectors = [_halfspace_projector(a, b) for a, b in zip(self.A, self.b)]
        return dykstra(projectors, x, polish=lambda q: self._polish(x, q))


def enumerate_vertices(A, b, max_vertices=MAX_VERTICES):
    """Vertices of ``{x : A x <= b}`` by brute force over active row subsets.

    Raises
    ------
    Unsupported
        If the enumeration would exceed ``max_vertices`` vertices or a
        tractable number of row subsets.
    """
    m, d = A.shape
    if comb(m, d) > 200_000:
        raise Unsupported(f"vertex enumeration over C({m},{d}) row subsets")
    verts = []
    for rows in combinations(range(m), d):
        Aj = A[list(rows)]
        if abs(np.linalg.det(Aj)) < 1e-12:
            continue
        v = np.linalg.solve(Aj, b[list(rows)])
        if np.all(A @ v <= b + 1e-9):
            if not any(np.linalg.norm(v - w) <= 1e-9 for w in verts):
                verts.append(v)
                if len(verts) > max_vertices:
                    raise Unsupported(f"more than {max_vertices} extreme points")
    return np.array(verts).reshape(-1, d)


def dykstra(projectors, x0, tol=TOL_GEOM, max_sweeps=MAX_SWEEPS, polish=None):
    """Dykstra's alternating projections onto an intersection.

    Parameters
    ----------
    projectors : list of callables
        Exact projections onto the member sets.
    x0 : ndarray
        Point to project.
    tol : float
        Stop once the squared change of the correction terms over a sweep
        is below ``tol**2`` and the iterate is within ``tol`` of every set.
    polish : callable, optional
        ``polish(x)`` returns an exact projection certified by optimality
        conditions, or None. Tried every 16 sweeps.

    Raises
    ------
    NonConvergence
        After ``max_sweeps`` sweeps without meeting the tolerance.
    """
    x = _vec(x0).copy()
    incs = [np.zeros_like(x) for _ in projectors]
    for sweep in range(1, max_sweeps + 1):
        change = 0.0
        for i, proj in enumerate(projectors):
            y = proj(x + incs[i])
            new_inc = x + incs[i] - y
            change += float(np.sum((new_inc - incs[i]) ** 2))
            incs[i] = new_inc
            x = y
        if change < tol * tol:
            if all(np.linalg.norm(proj(x) - x) <= tol for proj in projectors):
                return x
        if polish is not None and sweep % 16 == 0:
            p = polish(x)
            if p is not None:
                return p
    raise NonConvergence(f"Dykstra did not reach tol={tol} in {max_sweeps} sweeps")


def project_box_ball(x, lower, upper, center, radius, iters=60):
    """Exact projection onto ``Box(lower, upper) & Ball(center, radius)``.

    Works on stacks: ``x`` (k, d) with per-row box and ball data. The
    minimiser is ``clip((1 - mu) x + mu c)`` for the multiplier ``mu`` in
    [0, 1] that puts it on the sphere; ``|z(mu) - c|`` is monotone in ``mu``,
    so bisection finds it.

    Raises
    ------
    EmptyValue
        If some row's box misses its ball.
    """
    x = np.atleast_2d(x)
    center = np.atleast_2d(center)
    radius = np.asarray(radius, dtype=float).reshape(-1)
    z0 = np.clip(x, lower, upper)
    ok = np.linalg.norm(z0 - center, axis=1) <= radius
    out = z0
    if np.all(ok):
        return out
    bad = ~ok
    xb, cb, rb = x[bad], center[bad], radius[bad]
    lb = np.broadcast_to(lower, x.shape)[bad]
    ub = np.broadcast_to(upper, x.shape)[bad]
    zc = np.clip(cb, lb, ub)
    if np.any(np.linalg.norm(zc - cb, axis=1) > rb * (1 + 1e-12) + 1e-15):
        raise EmptyValue("box and ball do not intersect")
    lo_mu = np.zeros(len(xb))
    hi_mu = np.ones(len(xb))
    for _ in range(iters):
        mid = 0.5 * (lo_mu + hi_mu)
        z = np.clip((1 - mid)[:, None] * xb + mid[:, None] * cb, lb, ub)
        inside = np.linalg.norm(z - cb, axis=1) <= rb
        hi_mu = np.where(inside, mid, hi_mu)
        lo_mu = np.where(inside, lo_mu, mid)
    out = out.copy()
    out[bad] = np.clip((1 - hi_mu)[:, None] * xb + hi_mu[:, None] * cb, lb, ub)
    return out


def _sphere_root(g, a, b, ga, gb, tol, max_iter=200):
    """Illinois regula falsi for a monotone ``g`` with ``g(a) > 0 >= g(b)``.

    Returns the bracket end with ``g <= 0`` once ``g`` there is within
    ``tol`` of zero or the bracket has collapsed.
    """
    side = 0
    for _ in range(max_iter):
        if gb >= -tol or abs(b - a) <= 1e-16 * max(1.0, abs(b)):
            break
        m = b - gb * (b - a) / (gb - ga)
        if not (min(a, b) < m < max(a, b)):
            m = 0.5 * (a + b)
        gm = g(m)
        if gm > 0:
            a, ga = m, gm
            if side == 1:
                gb *= 0.5
            side = 1
        else:
            b, gb = m, gm
            if side == -1:
                ga *= 0.5
            side = -1
    return b


def project_set_ball(x, S, center, radius):
    """Exact projection of one point onto ``S & Ball(center, radius)``.

    Same multiplier argument as :func:`project_box_ball` with ``S.project``
    in place of the clip: ``z(mu) = P_S((1 - mu) x + mu c)``, and ``mu``
    found by a bracketing root search on ``|z(mu) - c| = radius``.
    """
    z = S.project(x)
    g0 = np.linalg.norm(z - center) - radius
    if g0 <= 0:
        return z
    g1 = np.linalg.norm(S.project(center) - center) - radius
    if g1 > radius * 1e-12 + 1e-15:
        raise EmptyValue("set and ball do not intersect")
    g = lambda mu: np.linalg.norm(S.project((1 - mu) * x + mu * center) - center) - radius  # noqa: E731
    mu = _sphere_root(g, 0.0, 1.0, g0, min(g1, 0.0), 1e-13 * (1.0 + radius))
    return S.project((1 - mu) * x + mu * center)


def support_point_set_ball(a, S, center, radius):
    """Maximiser of ``a . x`` over ``S & Ball(center, radius)``.

    Either the maximiser over ``S`` lies in the ball, or the answer is
    ``P_S(center + tau u)`` (``u = a / |a|``) with ``tau`` chosen so that
    it lands on the sphere; the distance to the centre grows with ``tau``.
    """
    p = S.support_point(a)
    if np.linalg.norm(p - center) <= radius:
        return p
    u = a / np.linalg.norm(a)
    g = lambda tau: radius - np.linalg.norm(S.project(center + tau * u) - center)  # noqa: E731
    g0 = g(0.0)
    if g0 < -(radius * 1e-12 + 1e-15):
        raise EmptyValue("set and ball do not intersect")
    lo, hi = 0.0, max(radius, 1.0)
    ghi = g(hi)
    for _ in range(200):
        if ghi < 0:
            break
        lo, g0, hi = hi, ghi, 2 * hi
        ghi = g(hi)
    else:
        return S.project(center + hi * u)
    # g decreases in tau; search the bracket with the signs flipped
    tau = _sphere_root(lambda t: -g(t), hi, lo, -ghi, -max(g0, 0.0), 1e-13 * (1.0 + radius))
    return S.project(center + tau * u)


def project_ball_ball(x, c1, r1, c2, r2):
    """Exact projection onto the intersection of two closed balls (stacked rows).

    Raises
    ------
    EmptyValue
        If some pair of balls is disjoint.
    """
    x = np.atleast_2d(x)
    c1, c2 = np.atleast_2d(c1), np.atleast_2d(c2)
    r1 = np.asarray(r1, dtype=float).reshape(-1)
    r2 = np.asarray(r2, dtype=float).reshape(-1)
    D = np.linalg.norm(c2 - c1, axis=1)
    if np.any(D > r1 + r2 + 1e-12):
        raise EmptyValue("balls do not intersect")

    def radial(x, c, r):
        v = x - c
        n = np.linalg.norm(v, axis=1)
        s = np.where(n > r, r / np.where(n > 0, n, 1.0), 1.0)
        return c + v * s[:, None]

    p1 = radial(x, c1, r1)
    ok1 = np.linalg.norm(p1 - c2, axis=1) <= r2 * (1 + 1e-12) + 1e-15
    p2 = radial(x, c2, r2)
    ok2 = np.linalg.norm(p2 - c1, axis=1) <= r1 * (1 + 1e-12) + 1e-15
    out = np.where(ok1[:, None], p1, p2)
    both = ~ok1 & ~ok2
    if np.any(both):
        Db = np.where(D[both] > 0, D[both], 1.0)
        u = (c2[both] - c1[both]) / Db[:, None]
        a = (Db ** 2 + r1[both] ** 2 - r2[both] ** 2) / (2 * Db)
        rho = np.sqrt(np.maximum(r1[both] ** 2 - a ** 2, 0.0))
        m = c1[both] + a[:, None] * u
        w = x[both] - m
        w = w - np.sum(w * u, axis=1)[:, None] * u
        wn = np.linalg.norm(w, axis=1)
        # x on the axis: every point of the rim is optimal, pick any
        fallback = np.zeros_like(w)
        if x.shape[1] > 1:
            fallback[:, 0] = -u[:, 1]
            fallback[:, 1] = u[:, 0]
        unit = np.where(wn[:, None] > 1e-300, w / np.where(wn > 1e-300, wn, 1.0)[:, None], fallback)
        out = out.copy()
        out[both] = m + rho[:, None] * unit
    return out


class Fattened(ConvexSet):
    """Closed fattening ``{x : d(x, base) <= eps}`` without materialising it."""

    def __init__(self, base, eps):
        self.base = base
        self.eps = float(eps)
        self.dim = base.dim

    def __repr__(self):
        return f"Fattened({self.base!r}, {self.eps})"

    def project(self, x):
        x = _vec(x)
        p = self.base.project(x)
        v = x - p
        n = np.linalg.norm(v, axis=-1, keepdims=True)
        scale = np.where(n > self.eps, self.eps / np.where(n > 0, n, 1.0), 1.0)
        return p + v * scale

    def distance(self, x):
        return np.maximum(self.base.distance(x) - self.eps, 0.0)

    def support(self, a):
        return self.base.support(a) + self.eps * float(np.linalg.norm(a))

    def support_point(self, a):
        a = _vec(a)
        n = np.linalg.norm(a)
        p = self.base.support_point(a)
        return p if n == 0 else p + self.eps * a / n

    def bounding_box(self):
        lo, hi = self.base.bounding_box()
        return lo - self.eps, hi + self.eps


def fatten(S, eps):
    """Closed eps-fattening, staying inside a parametric family when possible."""
    if isinstance(S, Ball):
        return Ball(S.center, S.radius + eps)
    if isinstance(S, Box) and S.dim == 1:
        return Box(S.lower - eps, S.upper + eps)
    return Fattened(S, eps)


class Intersection(ConvexSet):
    """Lazy intersection of convex sets; use :func:`intersect` to build one.

    Raises
    ------
    EmptyValue
        From ``project`` when the members turn out to be disjoint.
    """

    def __init__(self, members):
        self.members = list(members)
        self.dim = self.members[0].dim

    def __repr__(self):
        return f"Intersection({self.members!r})"

    def project(self, x):
        x = _vec(x)
        if x.ndim == 2:
            return np.array([self.project(row) for row in x])
        for S in self.members:
            p = S.project(x)
            if all(T.distance(p) <= TOL_GEOM * 1e-3 for T in self.members if T is not S):
                return p
        boxes = [S for S in self.members if isinstance(S, Box)]
        balls = [S for S in self.members if isinstance(S, Ball)]
        if len(boxes) + len(balls) == len(self.members):
            if len(boxes) == 1 and len(balls) == 1:
                B, C = boxes[0], balls[0]
                return project_box_ball(x, B.lower, B.upper, C.center, C.radius)[0]
            if not boxes and len(balls) == 2:
                a, c = balls
                return project_ball_ball(x, a.center, a.radius, c.center, c.radius)[0]
        if len(self.members) == 2 and len(balls) == 1:
            B = balls[0]
            other = self.members[0] if self.members[1] is B else self.members[1]
            return project_set_ball(x, other, B.center, B.radius)
        self._check_nonempty()
        return dykstra([S.project for S in self.members], x)

    def _check_nonempty(self):
        # alternating projections from a member point; disjoint sets drift apart
        x = self.members[0].project(np.zeros(self.dim))
        for _ in range(2000):
            for S in self.members:
                x = S.project(x)
            gap = max(float(T.distance(x)) for T in self.members)
            if gap <= TOL_GEOM:
                return
        if gap > 1e-6:
            raise EmptyValue("intersection is empty")

    def support_point(self, a):
        balls = [S for S in self.members if isinstance(S, Ball)]
        a = _vec(a)
        if len(self.members) == 2 and len(balls) == 1 and np.linalg.norm(a) > 0:
            B = balls[0]
            other = self.members[0] if self.members[1] is B else self.members[1]
            return support_point_set_ball(a, other, B.center, B.radius)
        # projected ascent: a maximiser p is a fixed point of x -> P(x + s a)
        # for every s > 0, and a moderate step keeps Dykstra well scaled
        a = _vec(a)
        lo, hi = self.bounding_box()
        n = np.linalg.norm(a)
        p = self.project(0.5 * (lo + hi))
        if n == 0:
            return p
        step = 4.0 * (1.0 + float(np.max(hi - lo))) * a / n
        for _ in range(500):
            q = self.project(p + step)
            if np.linalg.norm(q - p) <= TOL_GEOM:
                return q
            p = q
        return p

    def support(self, a):
        return float(_vec(a) @ self.support_point(a))

    def bounding_box(self):
        boxes = [S.bounding_box() for S in self.members]
        lo = np.max([b[0] for b in boxes], axis=0)
        hi = np.min([b[1] for b in boxes], axis=0)
        return lo, hi


def intersect(*sets):
    """Intersection of convex sets, simplified where the result stays parametric.

    Nested intersections are flattened, boxes are merged and, in dimension
    one, everything collapses to a single interval. Raises ``EmptyValue``
    when the simplification exposes an empty result.
    """
    flat = []
    for S in sets:
        flat.extend(S.members if isinstance(S, Intersection) else [S])
    if len(flat) == 1:
        return flat[0]
    dim = flat[0].dim
    if dim == 1 and not any(isinstance(S, Fattened) and S.dim != 1 for S in flat):
        lo = max(float(S.bounding_box()[0][0]) for S in flat)
        hi = min(float(S.bounding_box()[1][0]) for S in flat)
        if lo > hi:
            raise EmptyValue(f"interval intersection [{lo}, {hi}] is empty")
        return Box([lo], [hi])
    boxes = [S for S in flat if isinstance(S, Box)]
    rest = [S for S in flat if not isinstance(S, Box)]
    if boxes:
        lo = np.max([B.lower for B in boxes], axis=0)
        hi = np.min([B.upper for B in boxes], axis=0)
        merged = Box(lo, hi)
        if not rest:
            return merged
        rest = [merged] + rest
    return Intersection(rest)


def project(S, x):
    """Metric projection of ``x`` onto ``S``."""
    return S.project(x)


def distance(S, x):
    """Euclidean distance from ``x`` to ``S``."""
    return float(S.distance(_vec(x)))


def support_and_contains(S, T, tol=TOL_GEOM):
    """Decide ``S subset T`` and return a witness point of ``S`` outside ``T``.

    Extreme points of ``S`` are checked against ``T``. For a ball ``S`` and a
    polyhedral ``T`` the test compares support values row by row, with the
    maximiser of the violated row as witness.

    Returns
    -------
    Containment
        ``(contained, witness)``; ``witness`` is None when contained.

    Raises
    ------
    Unsupported
        For a polytope ``S`` against a ball ``T`` with too many vertices,
        and for composite ``S``.
    """
    if isinstance(S, Ball) and S.radius > 0:
        rows = T.halfspaces()
        if rows is not None:
            A, b = rows
            for a, bi in zip(A, b):
                if S.support(a) > bi + tol:
                    return Containment(False, S.support_point(a))
            return Containment(True, None)
        if isinstance(T, Ball):
            gap = np.linalg.norm(S.center - T.center) + S.radius - T.radius
            if gap <= tol:
                return Containment(True, None)
            v = S.center - T.center
            n = np.linalg.norm(v)
            u = v / n if n > 0 else np.eye(S.dim)[0]
            return Containment(False, S.center + S.radius * u)
        candidates = np.vstack([S.extreme_points()])
    elif isinstance(S, (Box, Ball)):
        candidates = S.extreme_points() if isinstance(S, Box) else S.center[None, :]
    elif isinstance(S, HPolytope):
        rows = T.halfspaces()
        if rows is not None:
            A, b = rows
            for a, bi in zip(A, b):
                p = S.support_point(a)
                if a @ p > bi + tol:
                    return Containment(False, p)
            return Containment(True, None)
        candidates = S.extreme_points()
    else:
        raise Unsupported(f"containment test for {type(S).__name__}")
    for p in candidates:
        if T.distance(p) > tol:
            return Containment(False, p)
    return Containment(True, None)


def sets_equal(S, T, tol=TOL_GEOM):
    """Set equality as mutual containment."""
    return support_and_contains(S, T, tol).contained and support_and_contains(T, S, tol).contained


def chebyshev_center(S):
    """Centre and radius of a largest inscribed ball.

    The set is solid (nonempty interior) iff the radius exceeds ``TOL_GEOM``.
    """
    if isinstance(S, Box):
        return 0.5 * (S.lower + S.upper), float(np.min(S.upper - S.lower) / 2)
    if isinstance(S, Ball):
        return S.center.copy(), S.radius
    if isinstance(S, HPolytope):
        return S.feasible_point.copy(), S.inradius
    raise Unsupported(f"inscribed ball for {type(S).__name__}")


def is_solid(S, tol=TOL_GEOM):
    return chebyshev_center(S)[1] > tol
