"""Cadlag selections: eps-selections, iterative refinement, projections, dense families.

All constructions work at grid resolution: a path is determined by its
values and left limits at the grid nodes and is affine in between. Jumps
(value differing from the left limit) are only created at nodes of the
left-jump set ``d1`` reported by the regularity checks.
"""

import logging
from dataclasses import dataclass, field

import numpy as np

from .errors import EmptyValue, SelectionInfeasible
from .geometry import TOL_GEOM
from .mappings import CadlagPath, RestrictedMapping
from .regularity import left_limit_point, probe_points

log = logging.getLogger(__name__)

HOLD_FRACTION = 0.5
CHUNK = 64


def refinement_schedule(tol_sel=1e-6):
    """``eps_0 = 1``, ``eps_i = eps_{i-1} / 2^i`` until ``eps_i < tol_sel``.

    Returns the full list ``[eps_0, ..., eps_k*]``.
    """
    eps = [1.0]
    i = 0
    while eps[-1] >= tol_sel:
        i += 1
        eps.append(eps[-1] / 2.0 ** i)
    return eps


def _d1_nodes(grid, d1):
    return np.array(sorted(grid.index_of(t) for t in d1 if t > 0), dtype=int)


def _ramp_start(seq, point, lo, hi, eps):
    """Smallest node ``j`` in ``[lo, hi)`` such that ``point`` is eps-close on ``[j, hi)``.

    Returns ``hi`` when even node ``hi - 1`` rejects the point.
    """
    if hi <= lo:
        return hi
    nodes = np.arange(lo, hi)
    ok = seq.distance(np.tile(point, (len(nodes), 1)), nodes) < eps
    bad = np.flatnonzero(~ok)
    return lo if bad.size == 0 else int(bad[-1]) + lo + 1


def _blend(right, times, j0, k, a, b):
    """Affine hand-over from ``a`` (at node ``j0 - 1``) to ``b`` (at node ``k``)."""
    if j0 >= k:
        return
    t0 = times[j0 - 1] if j0 > 0 else times[0]
    lam = (times[j0:k] - t0) / (times[k] - t0)
    right[j0:k] = (1 - lam)[:, None] * a + lam[:, None] * b


def epsilon_selection(mapping, eps, d1, grid, start=None):
    """Cadlag path within open distance ``eps`` of the mapping at every node.

    A local anchor is held while it stays within ``eps / 2`` of the values.
    When it drifts out, a new anchor is taken as the projection of the old
    one onto the current value, and the two are blended affinely over the
    longest stretch of preceding nodes on which the new anchor is also
    eps-close. Convexity of the fattened values makes every blend valid. At
    a node of ``d1`` the path jumps: its left limit is anchored in the
    left-limit set and its value in the current set.

    Parameters
    ----------
    mapping : SetValuedMapping or derived mapping
    eps : float
    d1 : sequence of float
        Times where jumps are allowed; must be grid nodes.
    grid : TimeGrid
    start : array_like, optional
        Reference point for the first anchor (default: origin).

    Raises
    ------
    SelectionInfeasible
        If a jump node has an empty left limit.
    """
    times = grid.times
    n = len(times)
    seq = mapping.sequence(times)
    jumps = set(_d1_nodes(grid, d1).tolist())
    ref = np.zeros(mapping.dimension) if start is None else np.asarray(start, float)
    a = seq.project(ref[None, :], np.array([0]))[0]
    right = np.empty((n, mapping.dimension))
    left = np.empty_like(right)
    right[0] = a
    hold = 0
    j = 1
    while j < n:
        if j in jumps:
            L = mapping.left_limit(times[j])
            if L is None:
                raise SelectionInfeasible("empty left limit at a jump", t=float(times[j]))
            if float(L.distance(a)) < eps:
                lval = a
            else:
                lval = L.project(a)
                j0 = _ramp_start(seq, lval, hold + 1, j, eps)
                _blend(right, times, j0, j, a, lval)
            left[j] = lval
            a = seq.project(lval[None, :], np.array([j]))[0]
            right[j] = a
            hold = j
            j += 1
            continue
        stop = min(j + CHUNK, n)
        nxt = [q for q in jumps if j < q < stop]
        if nxt:
            stop = min(nxt)
        nodes = np.arange(j, stop)
        ok = seq.distance(np.tile(a, (len(nodes), 1)), nodes) < HOLD_FRACTION * eps
        bad = np.flatnonzero(~ok)
        if bad.size == 0:
            right[j:stop] = a
            j = stop
            continue
        k = j + int(bad[0])
        right[j:k] = a
        new = seq.project(a[None, :], np.array([k]))[0]
        j0 = _ramp_start(seq, new, hold + 1, k, eps)
        _blend(right, times, j0, k, a, new)
        a = new
        right[k] = a
        hold = k
        j = k + 1
    jump_mask = np.zeros(n, bool)
    jump_mask[list(jumps)] = True
    left[~jump_mask] = right[~jump_mask]
    return CadlagPath(times, right, left)


def backward_selection(mapping, d1, grid, start=None):
    """Exact selection swept backwards from the horizon by nearest points.

    The value at ``T`` is the projection of ``start``; every earlier node
    takes the projection of the next node's point (at a node of ``d1``,
    the left limit is the projection onto the left-limit set first). A
    point is held while it stays in the values. Off ``d1`` each step moves
    at most the Hausdorff motion of the values, so the path inherits the
    mapping's Lipschitz bound inside pieces and is continuous at
    breakpoints whose value lies in the left limit.

    Raises
    ------
    SelectionInfeasible
        If a node of ``d1`` has an empty left limit.
    """
    times = grid.times
    n = len(times)
    seq = mapping.sequence(times)
    jump_nodes = _d1_nodes(grid, d1)
    ref = np.zeros(mapping.dimension) if start is None else np.asarray(start, float)
    right = np.empty((n, mapping.dimension))
    left = np.empty_like(right)
    p = seq.project(ref[None, :], np.array([n - 1]))[0]
    right[n - 1] = p
    j = n - 1
    while j > 0:
        if j in jump_nodes:
            L = mapping.left_limit(times[j])
            if L is None:
                raise SelectionInfeasible("empty left limit at a jump", t=float(times[j]))
            p = L.project(p)
        left[j] = p
        below = jump_nodes[jump_nodes < j]
        stop = max(j - CHUNK, int(below[-1]) if below.size else 0)
        nodes = np.arange(j - 1, stop - 1, -1)
        out = np.flatnonzero(seq.distance(np.tile(p, (len(nodes), 1)), nodes) > TOL_GEOM)
        held = nodes if out.size == 0 else nodes[:out[0]]
        right[held] = p
        if out.size == 0:
            j = int(nodes[-1])
            continue
        j = int(nodes[out[0]])
        p = seq.project(p[None, :], np.array([j]))[0]
        right[j] = p
    jump = np.zeros(n, bool)
    jump[jump_nodes] = True
    left[~jump] = right[~jump]
    return CadlagPath(times, right, left)


def _require(report):
    if report is None or not report.passed:
        failed = [] if report is None else [
            v.name for v in (report.isc, report.vec_domain, report.assumption1) if not v.passed]
        raise SelectionInfeasible(f"regularity checks did not pass: {failed or 'no report'}")


def _refine(mapping, path, eps_k, eps_next, d1_nodes):
    """One refinement round: a selection of ``value & (path + eps_k B)`` within ``eps_next``.

    Interior nodes take the projection of the current value onto the tube
    intersection. Because the current path is within ``eps_k`` of the
    values, that projection equals the plain projection onto the value,
    which is checked explicitly. Jump nodes take a left anchor from the
    left limit of ``value & O`` with ``O`` a ball of radius
    ``eps_k + eps_next / 3`` around the current left limit.
    """
    times = path.times
    seq = mapping.sequence(times)
    right = seq.project(path.right)
    off = np.linalg.norm(right - path.right, axis=1)
    outside = np.flatnonzero(off > eps_k)
    if outside.size:
        tube = seq.intersect_ball(path.right, eps_k, np.isin(np.arange(len(times)), outside))
        right[outside] = tube.project(path.right[outside], outside)
    left = right.copy()
    for j in d1_nodes:
        left[j] = left_limit_point(mapping, times[j], path.left[j], eps_k + eps_next / 3.0, path.left[j])
    return CadlagPath(times, right, left)


def michael_selection(mapping, tol_sel=1e-6, report=None, grid=None, return_iterates=False,
                      start=None):
    """Cadlag selection continuous off ``d1``, by successive refinement.

    ``y_1`` is the backward nearest-point sweep, an exact selection and so
    an ``eps_1``-selection whose slope off ``d1`` is at most the mapping's
    Lipschitz bound; round ``k`` produces a selection of
    the tube mapping ``value & (y_k + eps_k B)`` within ``eps_{k+1}``. The
    last iterate is projected onto the values and flagged ``projected``.

    Parameters
    ----------
    mapping : SetValuedMapping or derived mapping
    tol_sel : float
        Stop at the first ``eps_k < tol_sel``.
    report : RegularityReport
        Must pass; its ``d1`` fixes the admissible jump times.
    grid : TimeGrid
    return_iterates : bool
        Also return ``[y_1, ..., y_k*]``.
    start : array_like, optional
        Reference point for the first anchor.

    Raises
    ------
    SelectionInfeasible
        If the report does not pass or a left anchor cannot be found.
    """
    _require(report)
    return _michael(mapping, tol_sel, report.d1, grid, return_iterates, start)


def _michael(mapping, tol_sel, d1, grid, return_iterates=False, start=None, sweep=True):
    # sweep=False starts from the forward eps-selection: vectorised in chunks,
    # but its hand-over ramps may be steeper than the Lipschitz bound
    eps = refinement_schedule(tol_sel)
    d1_nodes = _d1_nodes(grid, d1)
    if sweep:
        y = backward_selection(mapping, d1, grid, start)
    else:
        y = epsilon_selection(mapping, eps[1], d1, grid, start)
    iterates = [y]
    for k in range(1, len(eps) - 1):
        y = _refine(mapping, y, eps[k], eps[k + 1], d1_nodes)
        iterates.append(y)
    seq = mapping.sequence(grid.times)
    right = seq.project(y.right)
    left = y.left.copy()
    for j in d1_nodes:
        L = mapping.left_limit(grid.times[j])
        left[j] = L.project(left[j])
    jump = np.zeros(len(right), bool)
    jump[d1_nodes] = True
    left[~jump] = right[~jump]
    out = CadlagPath(grid.times, right, left, flag="projected")
    return (out, iterates) if return_iterates else out


def projection_selection(mapping, x, grid):
    """Nearest-point selection ``t -> argmin_{z in value_t} |x - z|``.

    Left limits at breakpoints are the projections onto the exact
    left-limit sets.
    """
    x = np.asarray(x, float)
    times = grid.times
    seq = mapping.sequence(times)
    right = seq.project(np.tile(x, (len(times), 1)))
    left = right.copy()
    for j in np.flatnonzero(grid.is_breakpoint):
        if times[j] <= 0:
            continue
        L = mapping.left_limit(times[j])
        if L is None:
            raise EmptyValue("empty left limit", t=float(times[j]))
        left[j] = L.project(x)
    return CadlagPath(times, right, left)


@dataclass
class Target:
    """One target ``y`` at level ``eps`` with the grid runs of its preimage."""

    m: int
    k: int
    point: np.ndarray
    eps: float
    runs: list


@dataclass
class CastaingTargets:
    levels: list
    targets: list = field(default_factory=list)

    def __len__(self):
        return len(self.targets)


def lattice_refinement(dim):
    """Halvings of the lattice step needed so every point is within eps of a node."""
    if dim <= 3:
        return 0
    return int(np.ceil(np.log2(np.sqrt(dim) / 2.0))) + 1


def castaing_targets(mapping, grid, levels=6, points=None, d1=()):
    """Targets and interval covers of their preimages.

    For level ``k`` (radius ``2^-k``) the targets are the lattice points of
    step ``2^-k`` (halved in high dimension) in the inflated bounding box,
    or the given ``points``. A target keeps the maximal grid runs
    ``[a, b]`` on which the values come within open distance ``2^-k``,
    with ``a < b``; a run ending at a jump time before the horizon is cut
    one node short.
    """
    levels = list(range(1, levels + 1)) if np.isscalar(levels) else list(levels)
    times = grid.times
    n = len(times)
    seq = mapping.sequence(times)
    jump = np.zeros(n, bool)
    jump[_d1_nodes(grid, d1)] = True
    lo, hi = mapping.bounding_box()
    out = CastaingTargets(levels)
    for k in levels:
        eps = 2.0 ** -k
        if points is None:
            step = eps / 2 ** lattice_refinement(mapping.dimension)
            axes = [step * np.arange(np.ceil((a - eps) / step), np.floor((b + eps) / step) + 1)
                    for a, b in zip(lo, hi)]
            cand = np.array(np.meshgrid(*axes, indexing="ij")).reshape(len(axes), -1).T
        else:
            cand = np.atleast_2d(np.asarray(points, float))
        for m, y in enumerate(cand):
            inside = seq.distance(np.tile(y, (n, 1))) < eps
            runs = _runs(inside, jump, n)
            if runs:
                out.targets.append(Target(m, k, y, eps, runs))
    out.targets.sort(key=lambda tg: (tg.m, tg.k))
    return out


def _runs(mask, jump, n):
    edges = np.diff(np.concatenate([[0], mask.astype(int), [0]]))
    starts = np.flatnonzero(edges == 1)
    ends = np.flatnonzero(edges == -1) - 1
    runs = []
    for a, b in zip(starts, ends):
        if jump[b] and b < n - 1:
            b -= 1
        if a < b:
            runs.append((int(a), int(b)))
    return runs


@dataclass
class Member:
    path: CadlagPath
    target: tuple
    run: tuple


def castaing_family(mapping, targets, tol_sel=1e-6, report=None, grid=None):
    """Finite family of cadlag selections dense up to the finest target level.

    For every target and run ``[a, b]`` the refinement construction runs on
    the mapping cut down to the closed ball around the target inside
    ``[a, b]``, so the member stays within ``eps`` of the target there. If
    the horizon is a jump time, extra members copy a base selection and
    take target points of the terminal value at ``T``.

    Returns
    -------
    list of Member
        Ordered by (target index, level, run index).

    Raises
    ------
    SelectionInfeasible
        If the regularity report does not pass.
    """
    _require(report)
    times = grid.times
    family = []
    for tg in targets.targets:
        for r, (a, b) in enumerate(tg.runs):
            phi = RestrictedMapping(mapping, tg.point, tg.eps, times[a], times[b])
            try:
                # members need membership and the target tube, not a slope bound
                path = _michael(phi, tol_sel, report.d1, grid, start=tg.point, sweep=False)
            except (SelectionInfeasible, EmptyValue) as exc:
                log.info("target %s level %s run %s skipped: %s", tg.m, tg.k, r, exc)
                continue
            family.append(Member(path, (tg.m, tg.k), (r, float(times[a]), float(times[b]))))
    T = mapping.horizon
    if any(abs(t - T) <= 1e-12 * max(T, 1.0) for t in report.d1):
        base = _michael(mapping, tol_sel, report.d1, grid)
        ST = mapping.value(T)
        finest = max(targets.levels)
        pts = [tg.point for tg in targets.targets if tg.k == finest]
        pts = np.vstack([ST.extreme_points()] + ([np.array(pts)] if pts else []))
        proj = np.unique(np.round(ST.project(pts), 12), axis=0)
        for i, p in enumerate(proj):
            right = base.right.copy()
            right[-1] = p
            variant = CadlagPath(times, right, base.left, flag="projected")
            family.append(Member(variant, (-1, finest), (i, T, T)))
    if not family:
        raise SelectionInfeasible("no target produced a selection")
    return family


def family_values(family):
    """Stack of member values, shape (members, nodes, d)."""
    return np.stack([m.path.right for m in family])


def family_excess(mapping, grid, values, samples=100, seed=0, chunk=50):
    """Excess of each value set over the family, per node.

    Measured on the boundary points along the direction catalog plus
    ``samples`` projected random points of the value at each node.
    """
    times = grid.times
    n = len(times)
    seq = mapping.sequence(times)
    rng = np.random.default_rng(seed)
    out = np.zeros(n)
    for s in range(0, n, chunk):
        nodes = np.arange(s, min(s + chunk, n))
        pts, idx = probe_points(mapping, seq, nodes, rng, samples)
        V = values[:, idx, :]
        d = np.min(np.linalg.norm(V - pts[None, :, :], axis=2), axis=0)
        np.maximum.at(out, idx, d)
    return out


def hausdorff_excess(S, values, samples=100, seed=0):
    """One-sided excess of a set over a finite point set."""
    rng = np.random.default_rng(seed)
    pts = np.vstack([S.extreme_points(), S.sample(rng, samples)])
    values = np.atleast_2d(values)
    d = np.linalg.norm(pts[:, None, :] - values[None, :, :], axis=2)
    return float(np.max(np.min(d, axis=1)))


def membership_gap(mapping, grid, path):
    """Largest distance from the path's node values to the mapping's values."""
    seq = mapping.sequence(grid.times)
    return float(np.max(seq.distance(path.right)))


def contraction_gaps(iterates):
    """``max_t |y_i(t) - y_{i-1}(t)|`` for consecutive iterates (values and left limits)."""
    gaps = []
    for prev, cur in zip(iterates, iterates[1:]):
        g = max(np.max(np.linalg.norm(cur.right - prev.right, axis=1)),
                np.max(np.linalg.norm(cur.left - prev.left, axis=1)))
        gaps.append(float(g))
    return gaps


__all__ = [
    "CastaingTargets", "backward_selection", "Member", "Target", "castaing_family", "castaing_targets",
    "contraction_gaps", "epsilon_selection", "family_excess", "family_values",
    "hausdorff_excess", "membership_gap", "michael_selection", "projection_selection",
    "refinement_schedule", "TOL_GEOM",
]
