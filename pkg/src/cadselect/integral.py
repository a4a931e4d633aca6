"""Convex normal integrands, measures with atoms, and the interchange of inf and integral.

The functional ``K(y) = int h(t, y(t)) mu(dt)`` is evaluated at grid
resolution: the absolutely continuous part of ``mu`` by a per-cell
trapezoid rule (left-limit data at the right end of each cell) and each
atom at the path's value, i.e. its right limit.
"""

import json
from dataclasses import dataclass, field

import numpy as np

from .geometry import Ball, Box, TOL_GEOM
from .mappings import CadlagPath, CoefficientFunction, TimeGrid

FEAS_TOL = 1e-8
KINDS = ("quadratic_tracking", "linear_on_domain", "indicator_plus")


def _coef(value, horizon, shape=None):
    if value is None:
        return None
    if isinstance(value, (CoefficientFunction, CadlagPath)):
        return value
    return CoefficientFunction.constant(np.asarray(value, float), horizon)


class RadonMeasure:
    """Piecewise-constant density plus finitely many atoms on ``[0, T]``.

    Parameters
    ----------
    breakpoints : array_like, shape (n + 1,)
    values : array_like, shape (n,)
        Density on each ``[t_i, t_{i+1})``; nonnegative.
    atoms : sequence of (time, mass)
        Masses must be positive.
    """

    def __init__(self, breakpoints, values, atoms=()):
        self.breakpoints = np.asarray(breakpoints, float)
        self.values = np.asarray(values, float).reshape(-1)
        if len(self.values) != len(self.breakpoints) - 1:
            raise ValueError("need one density value per piece")
        if np.any(self.values < 0):
            raise ValueError("density must be nonnegative")
        self.atoms = [(float(t), float(m)) for t, m in atoms]
        T = self.breakpoints[-1]
        for t, m in self.atoms:
            if not 0 <= t <= T or m <= 0:
                raise ValueError(f"invalid atom ({t}, {m})")

    @classmethod
    def lebesgue(cls, horizon=1.0, atoms=()):
        return cls([0.0, horizon], [1.0], atoms)

    @classmethod
    def atomic(cls, atoms, horizon=1.0):
        return cls([0.0, horizon], [0.0], atoms)

    @property
    def horizon(self):
        return float(self.breakpoints[-1])

    def density(self, t):
        i = np.clip(np.searchsorted(self.breakpoints, t, side="right") - 1, 0, len(self.values) - 1)
        return self.values[i]

    def total_mass(self):
        return float(self.values @ np.diff(self.breakpoints) + sum(m for _, m in self.atoms))

    def support_times(self):
        return np.concatenate([self.breakpoints, [t for t, _ in self.atoms]])


class NormalIntegrand:
    """Convex integrand ``h(t, x)`` plus the indicator of ``x in S_t``.

    Kinds
    -----
    quadratic_tracking
        ``0.5 |x - c(t)|^2 + alpha(t)``; ``c`` is a path or coefficient function.
    linear_on_domain
        ``q(t) . x``.
    indicator_plus
        ``0.5 x' Q x + p(t) . x`` with a constant positive semidefinite ``Q``.
    """

    def __init__(self, kind, domain, target=None, alpha=0.0, q=None, Q=None, p=None):
        if kind not in KINDS:
            raise ValueError(f"unknown integrand kind {kind!r}")
        self.kind = kind
        self.domain = domain
        T, d = domain.horizon, domain.dimension
        self.target = _coef(target, T)
        self.alpha = _coef(alpha, T)
        self.q = _coef(q, T)
        self.Q = None if Q is None else np.asarray(Q, float).reshape(d, d)
        self.p = _coef(p if p is not None else (np.zeros(d) if kind == "indicator_plus" else None), T)
        need = {"quadratic_tracking": self.target, "linear_on_domain": self.q,
                "indicator_plus": self.Q}[kind]
        if need is None:
            raise ValueError(f"{kind} integrand is missing its coefficient")
        if self.Q is not None and np.min(np.linalg.eigvalsh(0.5 * (self.Q + self.Q.T))) < -1e-12:
            raise ValueError("Q must be positive semidefinite")

    def _at(self, f, times, left):
        vals = f.left_limit(times) if left else f(times)
        return np.asarray(vals, float).reshape(len(times), -1)

    def _domain_seq(self, times, left):
        if not left:
            return self.domain.sequence(times)
        from .batch import SetSequence
        sets = [self.domain.left_limit(t) if t > 0 else self.domain.value(t) for t in times]
        return SetSequence.from_sets(sets)

    def smooth_part(self, times, x, left=False):
        """Finite part of ``h`` at ``(times[i], x[i])``, ignoring the domain."""
        x = np.atleast_2d(x)
        if self.kind == "quadratic_tracking":
            c = self._at(self.target, times, left)
            a = self._at(self.alpha, times, left)[:, 0]
            return 0.5 * np.sum((x - c) ** 2, axis=1) + a
        if self.kind == "linear_on_domain":
            return np.sum(self._at(self.q, times, left) * x, axis=1)
        p = self._at(self.p, times, left)
        return 0.5 * np.einsum("ij,jk,ik->i", x, self.Q, x) + np.sum(p * x, axis=1)

    def evaluate(self, times, x, left=False):
        """``h`` including the indicator: ``+inf`` off the domain."""
        times = np.atleast_1d(np.asarray(times, float))
        x = np.atleast_2d(x)
        seq = self._domain_seq(times, left)
        off = seq.distance(x) > FEAS_TOL
        out = self.smooth_part(times, x, left)
        return np.where(off, np.inf, out)

    def minimizers(self, times, left=False):
        """Pointwise argmin of ``h(t, .)`` over ``S_t``, one row per time."""
        times = np.atleast_1d(np.asarray(times, float))
        seq = self._domain_seq(times, left)
        if self.kind == "quadratic_tracking":
            return seq.project(self._at(self.target, times, left))
        if self.kind == "linear_on_domain":
            q = self._at(self.q, times, left)
            return np.array([_linear_argmin(seq.set_at(i), q[i]) for i in range(len(times))])
        return self._fista(seq, times, left)

    def _fista(self, seq, times, left, iters=5000, tol=1e-13):
        """Projected accelerated gradient for the quadratic kind, all nodes at once."""
        p = self._at(self.p, times, left)
        L = max(float(np.max(np.linalg.eigvalsh(0.5 * (self.Q + self.Q.T)))), 1e-12)
        if L <= 1e-12:
            return np.array([_linear_argmin(seq.set_at(i), p[i]) for i in range(len(times))])
        x = seq.project(np.zeros_like(p))
        z, s = x.copy(), 1.0
        for _ in range(iters):
            grad = z @ self.Q.T + p
            x_new = seq.project(z - grad / L)
            s_new = 0.5 * (1 + np.sqrt(1 + 4 * s * s))
            z = x_new + ((s - 1) / s_new) * (x_new - x)
            done = np.max(np.abs(x_new - x)) < tol
            x, s = x_new, s_new
            if done:
                break
        return x

    def inf_values(self, times, left=False):
        """``inf_x h(t, x)`` at each time."""
        times = np.atleast_1d(np.asarray(times, float))
        return self.smooth_part(times, self.minimizers(times, left), left)


def _linear_argmin(S, q):
    """Minimiser of ``q . x`` over ``S`` (a support point in direction ``-q``)."""
    if isinstance(S, (Box, Ball)) or hasattr(S, "support_point"):
        return S.support_point(-np.asarray(q, float))
    raise TypeError(type(S))


def integrand_grid(h, mu, cells=1000):
    """Grid refined by the domain's breakpoints, density breakpoints and atoms."""
    bps = np.concatenate([h.domain.breakpoints, mu.support_times()])
    return TimeGrid(h.domain.horizon, cells, bps)


def _trapezoid(grid, mu, right_vals, left_vals):
    t = grid.times
    w = mu.density(0.5 * (t[:-1] + t[1:])) * np.diff(t)
    with np.errstate(invalid="ignore"):
        cells = np.where(w > 0, 0.5 * w * (right_vals[:-1] + left_vals[1:]), 0.0)
    return float(np.sum(cells))


def eval_integral_functional(h, mu, y, grid):
    """``K(y)``: trapezoid on the density part, right values at atoms.

    Returns ``+inf`` if the path leaves the domain at any evaluation node
    carrying positive weight.
    """
    t = grid.times
    right = h.evaluate(t, y(t))
    left = h.evaluate(t, y.left_limit(t), left=True)
    left[0] = right[0]
    total = _trapezoid(grid, mu, right, left)
    for ta, m in mu.atoms:
        total += m * float(h.evaluate([ta], y(np.array([ta])))[0])
    return total


@dataclass
class InfProfile:
    times: np.ndarray
    right: np.ndarray
    left: np.ndarray


def pointwise_inf_profile(h, grid):
    """Per-node ``inf_x h(t, x)``, with left-limit data at each node too."""
    t = grid.times
    right = h.inf_values(t)
    left = right.copy()
    bp = np.flatnonzero(grid.is_breakpoint & (t > 0))
    if bp.size:
        left[bp] = h.inf_values(t[bp], left=True)
    return InfProfile(t, right, left)


def integrate_profile(profile, mu, grid):
    """``int inf_x h(t, x) mu(dt)`` from a profile."""
    total = _trapezoid(grid, mu, profile.right, profile.left)
    for ta, m in mu.atoms:
        j = int(np.argmin(np.abs(grid.times - ta)))
        if abs(grid.times[j] - ta) <= 1e-12:
            val = profile.right[j]
        else:
            raise ValueError(f"atom at {ta} is not a grid node; build the grid with integrand_grid")
        total += m * float(val)
    return total


@dataclass
class InterchangeReport:
    lhs: float
    rhs: float
    gap: float
    candidate_count: int
    costs: list
    profile: InfProfile = field(repr=False)
    passed: bool
    structural_ok: bool
    left_side_infinite: bool
    tol_int: float

    def to_text(self):
        doc = {
            "lhs": self.lhs, "rhs": self.rhs, "gap": self.gap,
            "candidate_count": self.candidate_count, "costs": self.costs,
            "passed": self.passed, "structural_ok": self.structural_ok,
            "left_side_infinite": self.left_side_infinite, "tol_int": self.tol_int,
        }
        return json.dumps(doc, indent=2, sort_keys=True,
                          default=lambda v: None if v is None else float(v)) + "\n"

    def profile_csv(self):
        lines = ["t,inf_h"]
        lines += [f"{t:.17g},{v:.17g}" for t, v in zip(self.profile.times, self.profile.right)]
        return "\n".join(lines) + "\n"


def greedy_candidate(h, grid, family=()):
    """Pointwise minimiser path, repaired towards the nearest member where infeasible."""
    t = grid.times
    right = h.minimizers(t)
    left = right.copy()
    bp = np.flatnonzero(grid.is_breakpoint & (t > 0))
    if bp.size:
        left[bp] = h.minimizers(t[bp], left=True)
    path = CadlagPath(t, right, left)
    if family:
        bad = ~np.isfinite(h.evaluate(t, right))
        if np.any(bad):
            vals = np.stack([m(t) for m in family])
            near = np.argmin(np.linalg.norm(vals - right[None], axis=2), axis=0)
            right[bad] = vals[near[bad], np.flatnonzero(bad)]
            path = CadlagPath(t, right, left)
    return path


def verify_interchange(h, mu, family, grid, tol_int=1e-3):
    """Compare ``min_y K(y)`` over candidates with ``int inf h dmu``.

    Candidates are the given family plus the greedy pointwise minimiser.
    ``passed`` requires ``lhs - rhs <= tol_int * (1 + |rhs|)``; the
    one-sided bound ``lhs >= rhs - tol_int`` is reported separately. If
    every candidate has infinite cost the theorem's hypothesis is unmet:
    ``left_side_infinite`` is set and ``passed`` is None.
    """
    family = list(family)
    if not family:
        raise ValueError("candidate family is empty")
    cands = family + [greedy_candidate(h, grid, family)]
    costs = [eval_integral_functional(h, mu, y, grid) for y in cands]
    lhs = float(min(costs))
    profile = pointwise_inf_profile(h, grid)
    rhs = integrate_profile(profile, mu, grid)
    infinite = not np.isfinite(lhs)
    gap = lhs - rhs
    passed = None if infinite else bool(gap <= tol_int * (1 + abs(rhs)))
    return InterchangeReport(lhs, rhs, gap, len(cands), costs, profile, passed,
                             bool(lhs >= rhs - tol_int), infinite, tol_int)


class IntegralFunctional:
    """``K(y) = int h(t, y(t)) mu(dt)`` bound to a grid."""

    def __init__(self, h, mu, grid=None, cells=1000):
        self.h, self.mu = h, mu
        self.grid = grid or integrand_grid(h, mu, cells)

    def __call__(self, y):
        return eval_integral_functional(self.h, self.mu, y, self.grid)

    def rhs(self):
        return integrate_profile(pointwise_inf_profile(self.h, self.grid), self.mu, self.grid)


__all__ = ["NormalIntegrand", "RadonMeasure", "InterchangeReport", "IntegralFunctional",
           "eval_integral_functional", "pointwise_inf_profile", "integrate_profile",
           "verify_interchange", "greedy_candidate", "integrand_grid", "TOL_GEOM"]
