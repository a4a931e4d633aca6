"""Piecewise-parametric set-valued mappings and piecewise-affine cadlag paths.

A mapping on [0, T] is a list of pieces ``[start, end)``. Each piece has a
family (box, ball, H-polytope, or the tagged oscillator) whose parameters
move affinely from their value at ``start`` to their left limit at ``end``.
Isolated override sets redefine single times. Left limits are exact: they
come from the stored end-of-piece parameters.
"""

from dataclasses import dataclass, field

import numpy as np

from .batch import SetSequence
from .errors import EmptyValue
from .geometry import Ball, Box, ConvexSet, HPolytope, TOL_GEOM, fatten, intersect

FAMILIES = ("box", "ball", "hpolytope", "oscillator")
BREAK_TOL = 1e-12


def _piece_index(breakpoints, t, side):
    n = len(breakpoints) - 1
    i = np.searchsorted(breakpoints, t, side=side) - 1
    return np.clip(i, 0, n - 1)


class CoefficientFunction:
    """Scalar or vector function of time, affine between breakpoints.

    Parameters
    ----------
    breakpoints : array_like, shape (n + 1,)
        ``0 = t_0 < ... < t_n = T``.
    right_values : array_like, shape (n, ...)
        Value at ``t_i`` (the piece's starting value).
    left_values : array_like, shape (n, ...)
        Left limit at ``t_{i+1}`` of piece ``i``.
    terminal : array_like, optional
        Value at ``T``; defaults to the last left limit (continuity at T).
    """

    def __init__(self, breakpoints, right_values, left_values, terminal=None):
        self.breakpoints = np.asarray(breakpoints, float)
        self.right_values = np.asarray(right_values, float)
        self.left_values = np.asarray(left_values, float)
        n = len(self.breakpoints) - 1
        if n < 1 or np.any(np.diff(self.breakpoints) <= 0):
            raise ValueError("breakpoints must be strictly increasing with at least one piece")
        if len(self.right_values) != n or len(self.left_values) != n:
            raise ValueError("need one right value and one left value per piece")
        self.terminal = self.left_values[-1] if terminal is None else np.asarray(terminal, float)

    @classmethod
    def constant(cls, value, horizon=1.0):
        v = np.asarray(value, float)
        return cls([0.0, horizon], [v], [v])

    @classmethod
    def affine(cls, start, end, horizon=1.0):
        return cls([0.0, horizon], [np.asarray(start, float)], [np.asarray(end, float)])

    @property
    def horizon(self):
        return float(self.breakpoints[-1])

    def _interp(self, t, i):
        a, b = self.breakpoints[i], self.breakpoints[i + 1]
        lam = (t - a) / (b - a)
        R, L = self.right_values[i], self.left_values[i]
        lam = lam.reshape(lam.shape + (1,) * (R.ndim - lam.ndim))
        return R + lam * (L - R)

    def __call__(self, t):
        t = np.asarray(t, float)
        out = self._interp(t, _piece_index(self.breakpoints, t, "right"))
        at_end = t >= self.horizon
        if np.any(at_end):
            out = np.where(at_end.reshape(at_end.shape + (1,) * (out.ndim - at_end.ndim)),
                           self.terminal, out)
        return out

    def left_limit(self, t):
        t = np.asarray(t, float)
        return self._interp(t, _piece_index(self.breakpoints, t, "left"))

    def lipschitz_bound(self):
        slopes = (self.left_values - self.right_values).reshape(len(self.right_values), -1)
        return float(np.max(np.abs(slopes).max(axis=1) / np.diff(self.breakpoints)))


@dataclass
class Piece:
    """One piece ``[start, end)`` of a mapping.

    ``right`` holds the family parameters at ``start`` and ``left`` their
    left limits at ``end``. Polytope normals and bounding boxes are fixed
    over the piece (taken from ``right``); only offsets move.

    The oscillator family is the singleton ``offset + direction * sin(1 / (end - t))``,
    whose left limit at ``end`` does not exist.
    """

    start: float
    end: float
    family: str
    right: dict
    left: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}")
        self.right = {k: np.asarray(v, float) for k, v in self.right.items()}
        self.left = {k: np.asarray(v, float) for k, v in self.left.items()}
        if self.family != "oscillator":
            for key in self.moving_keys():
                self.left.setdefault(key, self.right[key])

    def moving_keys(self):
        return {"box": ("lower", "upper"), "ball": ("center", "radius"),
                "hpolytope": ("offsets",), "oscillator": ()}[self.family]

    def params(self, lam):
        """Parameters at relative position ``lam`` (scalar or 1-D array)."""
        lam = np.asarray(lam, float)
        out = {}
        for key, R in self.right.items():
            if key in self.moving_keys():
                L = self.left[key]
                lam_b = lam.reshape(lam.shape + (1,) * R.ndim)
                out[key] = (1.0 - lam_b) * R + lam_b * L
            else:
                out[key] = R
        return out

    def build(self, p, t=None) -> ConvexSet:
        if self.family == "box":
            return Box(p["lower"], p["upper"])
        if self.family == "ball":
            return Ball(p["center"], float(p["radius"]))
        if self.family == "hpolytope":
            return HPolytope(p["normals"], p["offsets"], p["lower"], p["upper"])
        x = p["offset"] + p["direction"] * np.sin(1.0 / (self.end - t))
        return Box(x, x)

    def value(self, t):
        lam = (t - self.start) / (self.end - self.start)
        return self.build(self.params(lam), t)

    def end_value(self):
        """Left limit at ``end``, or None for the oscillator."""
        if self.family == "oscillator":
            return None
        return self.build(self.params(1.0))

    def lipschitz_bound(self):
        if self.family == "oscillator":
            return np.inf
        length = self.end - self.start
        if self.family == "box":
            dl = np.abs(self.left["lower"] - self.right["lower"])
            du = np.abs(self.left["upper"] - self.right["upper"])
            return float(np.linalg.norm(np.maximum(dl, du)) / length)
        if self.family == "ball":
            dc = np.linalg.norm(self.left["center"] - self.right["center"])
            dr = abs(float(self.left["radius"] - self.right["radius"]))
            return float((dc + dr) / length)
        if np.allclose(self.left["offsets"], self.right["offsets"]):
            return 0.0
        return np.inf

    def validate(self, dim):
        """Raise ``EmptyValue`` or ``ValueError`` if the piece is malformed."""
        if not self.end > self.start:
            raise ValueError(f"piece [{self.start}, {self.end}) has nonpositive length")
        need = {"box": ("lower", "upper"), "ball": ("center", "radius"),
                "hpolytope": ("normals", "offsets", "lower", "upper"),
                "oscillator": ("offset", "direction")}[self.family]
        for key in need:
            if key not in self.right:
                raise ValueError(f"{self.family} piece missing parameter {key!r}")
        for key in need:
            if key in ("radius", "offsets", "normals"):
                continue
            if self.right[key].shape != (dim,):
                raise ValueError(f"parameter {key!r} must have length {dim}")
        if self.family != "oscillator":
            # affine parameters: validity at both ends gives validity throughout
            self.build(self.params(0.0))
            self.end_value()


class SetValuedMapping:
    """Piecewise-parametric closed convex-valued mapping on ``[0, horizon]``.

    Parameters
    ----------
    dimension : int
    horizon : float
    pieces : list of Piece
        Must partition ``[0, horizon]`` in order.
    overrides : dict, optional
        Time to ``ConvexSet``; redefines the value at that single time.
    name : str, optional

    Raises
    ------
    ValueError, EmptyValue
        For pieces that do not partition the horizon or yield empty values.
    """

    def __init__(self, dimension, horizon, pieces, overrides=None, name=None):
        self.dimension = int(dimension)
        self.horizon = float(horizon)
        self.pieces = list(pieces)
        self.overrides = {float(t): S for t, S in (overrides or {}).items()}
        self.name = name
        if not self.pieces:
            raise ValueError("mapping needs at least one piece")
        if self.pieces[0].start != 0.0 or self.pieces[-1].end != self.horizon:
            raise ValueError("pieces must start at 0 and end at the horizon")
        for a, b in zip(self.pieces, self.pieces[1:]):
            if a.end != b.start:
                raise ValueError(f"pieces do not abut at {a.end} / {b.start}")
        for p in self.pieces:
            p.validate(self.dimension)
        for t, S in self.overrides.items():
            if not 0.0 <= t <= self.horizon:
                raise ValueError(f"override time {t} outside [0, {self.horizon}]")
            if S.dim != self.dimension:
                raise ValueError("override set has the wrong dimension")
        last = self.pieces[-1]
        if last.family == "oscillator" and self.horizon not in self.overrides:
            raise ValueError("an oscillator piece ending at the horizon needs an override there")
        self._starts = np.array([p.start for p in self.pieces])

    def __repr__(self):
        label = self.name or "SetValuedMapping"
        return f"<{label}: d={self.dimension}, T={self.horizon}, {len(self.pieces)} pieces>"

    @property
    def breakpoints(self):
        """Piece boundaries, override times and the horizon, sorted."""
        pts = {p.start for p in self.pieces} | {self.horizon} | set(self.overrides)
        return np.array(sorted(pts))

    def piece_at(self, t):
        i = int(np.searchsorted(self._starts, t, side="right") - 1)
        return max(i, 0)

    def value(self, t) -> ConvexSet:
        t = float(t)
        if not 0.0 <= t <= self.horizon:
            raise ValueError(f"t={t} outside [0, {self.horizon}]")
        if t in self.overrides:
            return self.overrides[t]
        if t == self.horizon:
            return self.pieces[-1].end_value()
        return self.pieces[self.piece_at(t)].value(t)

    def left_limit(self, t):
        """Exact left-limit set, ``None`` when it is empty."""
        t = float(t)
        if t <= 0.0:
            return Box(np.zeros(self.dimension), np.zeros(self.dimension))
        i = int(np.searchsorted(self._starts, t, side="left") - 1)
        piece = self.pieces[i]
        if t == piece.end:
            return piece.end_value()
        return piece.value(t)

    def sequence(self, times) -> SetSequence:
        """Values at many times, stacked for vectorised projection.

        Results are cached per time array; treat them as read-only.
        """
        times = np.asarray(times, float)
        key = times.tobytes()
        cache = self.__dict__.setdefault("_seq_cache", {})
        if key not in cache:
            if len(cache) >= 16:
                cache.pop(next(iter(cache)))
            cache[key] = self._sequence(times)
        return cache[key]

    def _sequence(self, times):
        n, d = len(times), self.dimension
        lower = np.full((n, d), -np.inf)
        upper = np.full((n, d), np.inf)
        centers = np.zeros((n, 2, d))
        radii = np.full((n, 2), np.inf)
        objects = {}
        idx = np.clip(np.searchsorted(self._starts, times, side="right") - 1, 0, None)
        for k, piece in enumerate(self.pieces):
            rows = np.flatnonzero((idx == k) & (times < self.horizon))
            if k == len(self.pieces) - 1:
                rows = np.flatnonzero(idx == k)
            if rows.size == 0:
                continue
            lam = np.minimum((times[rows] - piece.start) / (piece.end - piece.start), 1.0)
            if piece.family == "oscillator":
                p = piece.right
                live = times[rows] < piece.end
                x = p["offset"] + np.outer(np.sin(1.0 / (piece.end - times[rows][live])), p["direction"])
                lower[rows[live]] = x
                upper[rows[live]] = x
                continue
            par = piece.params(lam)
            if piece.family == "box":
                lower[rows], upper[rows] = par["lower"], par["upper"]
            elif piece.family == "ball":
                centers[rows, 0], radii[rows, 0] = par["center"], par["radius"].reshape(-1)
            else:
                for j, r in enumerate(rows):
                    objects[int(r)] = piece.value(times[r])
        if np.any(lower > upper) or np.any(radii < 0):
            raise EmptyValue("mapping has an empty value on the requested times")
        seq = SetSequence(lower, upper, centers, radii, objects)
        for t, S in self.overrides.items():
            for r in np.flatnonzero(times == t):
                seq = seq.replace(int(r), S)
        return seq

    def lipschitz_bound(self):
        """Largest parameter speed over the pieces (Hausdorff-Lipschitz bound)."""
        return max(p.lipschitz_bound() for p in self.pieces)

    def bounding_box(self):
        los, his = [], []
        for p in self.pieces:
            if p.family == "oscillator":
                r = np.abs(p.right["direction"])
                los.append(p.right["offset"] - r)
                his.append(p.right["offset"] + r)
                continue
            for S in (p.build(p.params(0.0)), p.end_value()):
                lo, hi = S.bounding_box()
                los.append(lo)
                his.append(hi)
        for S in self.overrides.values():
            lo, hi = S.bounding_box()
            los.append(lo)
            his.append(hi)
        return np.min(los, axis=0), np.max(his, axis=0)

    def min_piece_length(self):
        return min(p.end - p.start for p in self.pieces)


class DerivedMapping:
    """Common plumbing for mappings built from other mappings."""

    base: SetValuedMapping

    @property
    def dimension(self):
        return self.base.dimension

    @property
    def horizon(self):
        return self.base.horizon

    def sequence(self, times):
        return SetSequence.from_sets([self.value(t) for t in times])

    def lipschitz_bound(self):
        return self.base.lipschitz_bound()

    def bounding_box(self):
        return self.base.bounding_box()

    def min_piece_length(self):
        bp = self.breakpoints
        return float(np.min(np.diff(bp)))


class RestrictedMapping(DerivedMapping):
    """``base`` outside ``[t_a, t_b]`` and ``base & closed_ball(center, radius)`` inside."""

    def __init__(self, base, center, radius, t_a, t_b):
        self.base = base
        self.center = np.asarray(center, float)
        self.radius = float(radius)
        self.t_a, self.t_b = float(t_a), float(t_b)

    @property
    def breakpoints(self):
        return np.union1d(self.base.breakpoints, [self.t_a, self.t_b])

    def _inside(self, t):
        return self.t_a <= t <= self.t_b

    def value(self, t):
        S = self.base.value(t)
        return intersect(S, Ball(self.center, self.radius)) if self._inside(t) else S

    def left_limit(self, t):
        L = self.base.left_limit(t)
        if L is None or not (self.t_a < t <= self.t_b):
            return L
        return intersect(L, Ball(self.center, self.radius))

    def sequence(self, times):
        times = np.asarray(times, float)
        mask = (times >= self.t_a) & (times <= self.t_b)
        return self.base.sequence(times).intersect_ball(self.center, self.radius, mask)


class IntersectedMapping(DerivedMapping):
    """``t -> first_t & (second_t + eps B)`` with the closed fattening."""

    def __init__(self, first, second, eps):
        if first.dimension != second.dimension or first.horizon != second.horizon:
            raise ValueError("mappings must share dimension and horizon")
        self.base, self.second, self.eps = first, second, float(eps)

    @property
    def breakpoints(self):
        return np.union1d(self.base.breakpoints, self.second.breakpoints)

    def value(self, t):
        return intersect(self.base.value(t), fatten(self.second.value(t), self.eps))

    def left_limit(self, t):
        a, b = self.base.left_limit(t), self.second.left_limit(t)
        if a is None or b is None:
            return None
        try:
            return intersect(a, fatten(b, self.eps))
        except EmptyValue:
            return None

    def sequence(self, times):
        A = self.base.sequence(times)
        B = self.second.sequence(times)
        plain = (not A.objects and not B.objects and self.dimension == 1
                 and np.all(np.isinf(A.radii)) and np.all(np.isinf(B.radii)))
        if plain:
            lo = np.maximum(A.lower, B.lower - self.eps)
            hi = np.minimum(A.upper, B.upper + self.eps)
            if np.any(lo > hi):
                raise EmptyValue("intersection is empty on the requested times")
            return SetSequence.from_arrays(lo, hi)
        return super().sequence(times)

    def lipschitz_bound(self):
        return max(self.base.lipschitz_bound(), self.second.lipschitz_bound())

    def bounding_box(self):
        lo, hi = self.base.bounding_box()
        lo2, hi2 = self.second.bounding_box()
        return np.maximum(lo, lo2 - self.eps), np.minimum(hi, hi2 + self.eps)


def evaluate(mapping, t):
    """Value of the mapping at ``t``."""
    return mapping.value(t)


def left_limit(mapping, t):
    """Left-limit set at ``t``; None when empty."""
    return mapping.left_limit(t)


def fattened_membership(mapping, t, x, eps):
    """True iff ``x`` lies in the open eps-fattening of the value at ``t``."""
    return float(mapping.value(t).distance(np.asarray(x, float))) < eps


def sets_close(S, T, tol=TOL_GEOM):
    """Mutual containment, tolerating composite sets via sampled checks."""
    from .geometry import sets_equal
    return sets_equal(S, T, tol)


class TimeGrid:
    """Uniform grid with ``cells`` cells on ``[0, T]`` refined by breakpoints.

    Uniform nodes closer than ``1e-12 * T`` to a breakpoint are dropped in
    favour of the breakpoint itself.
    """

    def __init__(self, horizon, cells=1000, breakpoints=()):
        self.horizon = float(horizon)
        self.cells = int(cells)
        bps = np.unique(np.concatenate([[0.0, self.horizon], np.asarray(breakpoints, float)]))
        uniform = np.linspace(0.0, self.horizon, self.cells + 1)
        near = np.min(np.abs(uniform[:, None] - bps[None, :]), axis=1) <= BREAK_TOL * self.horizon
        self.times = np.union1d(uniform[~near], bps)
        self.breakpoints = bps
        self.is_breakpoint = np.isin(self.times, bps)

    @classmethod
    def for_mapping(cls, mapping, cells=1000):
        return cls(mapping.horizon, cells, mapping.breakpoints)

    def __len__(self):
        return len(self.times)

    def index_of(self, t):
        i = int(np.argmin(np.abs(self.times - t)))
        if abs(self.times[i] - t) > BREAK_TOL * max(self.horizon, 1.0):
            raise KeyError(f"time {t} is not a grid node")
        return i

    @property
    def step(self):
        return self.horizon / self.cells


class CadlagPath:
    """Right-continuous path, affine between grid nodes, with stored left limits.

    Parameters
    ----------
    times : ndarray, shape (n,)
        Nodes ``0 = t_0 < ... < t_{n-1} = T``.
    right : ndarray, shape (n, d)
        Values at the nodes.
    left : ndarray, shape (n, d)
        Left limits at the nodes. ``left[0]`` is the origin by convention.
    flag : str
        Provenance label written to CSV output.
    """

    def __init__(self, times, right, left=None, flag="interior"):
        self.times = np.asarray(times, float)
        self.right = np.atleast_2d(np.asarray(right, float))
        if self.right.shape[0] != len(self.times):
            self.right = self.right.reshape(len(self.times), -1)
        self.left = self.right.copy() if left is None else np.asarray(left, float).reshape(self.right.shape).copy()
        self.left[0] = 0.0
        self.flag = flag
        self.dimension = self.right.shape[1]

    @classmethod
    def from_nodes(cls, times, right, left=None, flag="interior"):
        return cls(times, right, left, flag)

    @classmethod
    def constant(cls, times, value, flag="interior"):
        value = np.asarray(value, float)
        return cls(times, np.tile(value, (len(times), 1)), None, flag)

    @property
    def horizon(self):
        return float(self.times[-1])

    def jump_nodes(self, tol=0.0):
        """Indices ``j > 0`` where the stored left limit differs from the value."""
        gap = np.linalg.norm(self.right - self.left, axis=1)
        gap[0] = 0.0
        return np.flatnonzero(gap > tol)

    def __call__(self, t):
        t = np.asarray(t, float)
        j = np.clip(np.searchsorted(self.times, t, side="right") - 1, 0, len(self.times) - 2)
        a, b = self.times[j], self.times[j + 1]
        lam = np.clip((t - a) / (b - a), 0.0, 1.0)[..., None]
        out = self.right[j] + lam * (self.left[j + 1] - self.right[j])
        at_end = t >= self.times[-1]
        return np.where(at_end[..., None], self.right[-1], out)

    def left_limit(self, t):
        t = np.asarray(t, float)
        j = np.clip(np.searchsorted(self.times, t, side="left") - 1, 0, len(self.times) - 2)
        a, b = self.times[j], self.times[j + 1]
        lam = np.clip((t - a) / (b - a), 0.0, 1.0)[..., None]
        out = self.right[j] + lam * (self.left[j + 1] - self.right[j])
        return np.where((t <= 0)[..., None], 0.0, out)
