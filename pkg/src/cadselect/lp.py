"""Dense two-phase simplex for the small LPs of the geometry kernel.

Problems here have a handful of variables and at most a few dozen rows
(support functions and inscribed balls of H-polytopes), so a dense tableau
with Bland's anti-cycling rule is plenty.
"""

import numpy as np

from .errors import EmptyValue, NonConvergence

PIVOT_TOL = 1e-12


class LPUnbounded(NonConvergence):
    """The LP objective is unbounded above."""


class LPInfeasible(EmptyValue):
    """The LP constraints admit no point."""


def _pivot(T, row, col):
    T[row] /= T[row, col]
    others = np.arange(T.shape[0]) != row
    T[others] -= np.outer(T[others, col], T[row])


def _run(T, basis, n_cols, max_iter):
    """Maximize in place. Objective row is the last row, holding z - c.x = 0."""
    for _ in range(max_iter):
        obj = T[-1, :n_cols]
        entering = np.flatnonzero(obj < -PIVOT_TOL)
        if entering.size == 0:
            return
        col = entering[0]
        column = T[:-1, col]
        rows = np.flatnonzero(column > PIVOT_TOL)
        if rows.size == 0:
            raise LPUnbounded("objective unbounded")
        ratios = T[rows, -1] / column[rows]
        best = ratios.min()
        ties = rows[ratios <= best + PIVOT_TOL * max(1.0, abs(best))]
        # Bland: among tied rows leave the variable with the smallest index
        row = ties[np.argmin([basis[r] for r in ties])]
        _pivot(T, row, col)
        basis[row] = col
    raise NonConvergence(f"simplex exceeded {max_iter} pivots")


def linprog_max(c, A_ub, b_ub, max_iter=10_000):
    """Maximize ``c @ x`` subject to ``A_ub @ x <= b_ub`` and ``x >= 0``.

    Returns
    -------
    x : ndarray
        An optimal vertex.
    value : float
        The optimal objective value.

    Raises
    ------
    LPInfeasible
        If no ``x >= 0`` satisfies the constraints.
    LPUnbounded
        If the objective is unbounded.
    """
    c = np.asarray(c, dtype=float)
    A = np.atleast_2d(np.asarray(A_ub, dtype=float))
    b = np.asarray(b_ub, dtype=float).reshape(-1)
    m, n = A.shape

    neg = b < 0
    n_art = int(neg.sum())
    n_cols = n + m + n_art
    T = np.zeros((m + 1, n_cols + 1))
    T[:m, :n] = A
    T[:m, n:n + m] = np.eye(m)
    T[:m, -1] = b
    T[:m][neg] *= -1.0
    basis = list(range(n, n + m))
    for k, r in enumerate(np.flatnonzero(neg)):
        T[r, n + m + k] = 1.0
        basis[r] = n + m + k

    if n_art:
        # phase 1: maximize -(sum of artificials)
        T[-1, n + m:n_cols] = 1.0
        for r in np.flatnonzero(neg):
            T[-1] -= T[r]
        _run(T, basis, n_cols, max_iter)
        if T[-1, -1] < -1e-9 * max(1.0, np.abs(b).max()):
            raise LPInfeasible("linear constraints are infeasible")
        keep = []
        for r in range(m):
            if basis[r] >= n + m:
                candidates = np.flatnonzero(np.abs(T[r, :n + m]) > 1e-9)
                if candidates.size == 0:
                    continue  # redundant row
                _pivot(T, r, candidates[0])
                basis[r] = candidates[0]
            keep.append(r)
        T = np.vstack([T[keep][:, list(range(n + m)) + [n_cols]], np.zeros((1, n + m + 1))])
        basis = [basis[r] for r in keep]
        n_cols = n + m

    T[-1, :] = 0.0
    T[-1, :n] = -c
    for r, var in enumerate(basis):
        if T[-1, var] != 0.0:
            T[-1] -= T[-1, var] * T[r]
    _run(T, basis, n_cols, max_iter)

    x = np.zeros(n_cols)
    for r, var in enumerate(basis):
        x[var] = T[r, -1]
    x = x[:n]
    return x, float(c @ x)
