"""Self-contained dense simplex solver for small linear programs.

Solves the standard form

    minimize    c . z
    subject to  G z <= h,    z free,

by splitting z into nonnegative parts, appending slacks, and running a
two-phase tableau simplex.  Pivots follow Bland's rule (lowest eligible
index entering, lowest basis index leaving on ratio ties), which guarantees
termination and makes the returned vertex deterministic.

Only dense problems of modest size are targeted; the solver exists as a
dependency-free reference against which external LP backends can be checked.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

__all__ = ["LpStatus", "LpResult", "solve_lp", "PIVOT_TOL"]

# Reduced costs above -PIVOT_TOL are treated as optimal; pivot elements
# below PIVOT_TOL are treated as zero in the ratio test.
PIVOT_TOL = 1e-9


class LpStatus(enum.Enum):
    OPTIMAL = "Optimal"
    INFEASIBLE = "Infeasible"
    UNBOUNDED = "Unbounded"
    ITERATION_LIMIT = "IterationLimit"


@dataclass(frozen=True)
class LpResult:
    """Outcome of an LP solve: primal point, objective, status, pivot count."""

    z: np.ndarray
    objective: float
    status: LpStatus
    iterations: int


def _pivot(tableau: np.ndarray, row: int, col: int) -> None:
    tableau[row] /= tableau[row, col]
    column = tableau[:, col].copy()
    column[row] = 0.0
    tableau -= np.outer(column, tableau[row])


def _run_simplex(tableau: np.ndarray, basis: list[int], cost: np.ndarray,
                 max_iters: int, start_iter: int) -> tuple[LpStatus, int]:
    """Iterate Bland-rule pivots until optimality or a resource limit."""
    iters = start_iter
    while True:
        reduced = cost - tableau[:, :-1].T @ cost[basis]
        entering_candidates = np.nonzero(reduced < -PIVOT_TOL)[0]
        if entering_candidates.size == 0:
            return LpStatus.OPTIMAL, iters
        if iters >= max_iters:
            return LpStatus.ITERATION_LIMIT, iters
        enter = int(entering_candidates[0])
        column = tableau[:, enter]
        rows = np.nonzero(column > PIVOT_TOL)[0]
        if rows.size == 0:
            return LpStatus.UNBOUNDED, iters
        ratios = tableau[rows, -1] / column[rows]
        best = ratios.min()
        ties = rows[ratios <= best + 1e-12 * max(1.0, abs(best))]
        leave = int(min(ties, key=lambda r: basis[r]))
        _pivot(tableau, leave, enter)
        basis[leave] = enter
        iters += 1


def solve_lp(c: np.ndarray, G: np.ndarray, h: np.ndarray,
             max_iters: int) -> LpResult:
    """Minimize ``c . z`` subject to ``G z <= h`` with ``z`` unrestricted.

    Args:
        c: objective coefficients, shape (p,).
        G: constraint matrix, shape (q, p).
        h: constraint right-hand sides, shape (q,).
        max_iters: total pivot budget across both phases.

    Returns:
        An :class:`LpResult`; on ITERATION_LIMIT the point is the best basic
        solution reached (feasible only if phase 1 completed).
    """
    c = np.asarray(c, dtype=float)
    G = np.asarray(G, dtype=float)
    h = np.asarray(h, dtype=float)
    q, p = G.shape

    # Columns: z+ (p), z- (p), slacks (q), then artificials for flipped rows.
    body = np.hstack([G, -G, np.eye(q)])
    rhs = h.copy()
    flipped = rhs < 0
    body[flipped] *= -1.0
    rhs[flipped] *= -1.0
    n_struct = 2 * p + q

    art_rows = np.nonzero(flipped)[0]
    n_art = art_rows.size
    if n_art:
        art_cols = np.zeros((q, n_art))
        art_cols[art_rows, np.arange(n_art)] = 1.0
        body = np.hstack([body, art_cols])
    tableau = np.hstack([body, rhs[:, None]])

    basis = [2 * p + r for r in range(q)]
    for pos, r in enumerate(art_rows):
        basis[r] = n_struct + pos

    iters = 0
    if n_art:
        phase1_cost = np.zeros(n_struct + n_art)
        phase1_cost[n_struct:] = 1.0
        status, iters = _run_simplex(tableau, basis, phase1_cost, max_iters, 0)
        if status is LpStatus.ITERATION_LIMIT:
            return LpResult(np.zeros(p), float("nan"), status, iters)
        infeasibility = float(phase1_cost[basis] @ tableau[:, -1])
        if infeasibility > 1e-8 * max(1.0, float(np.abs(h).max(initial=0.0))):
            return LpResult(np.zeros(p), float("nan"), LpStatus.INFEASIBLE, iters)
        # Pivot lingering artificials out of the basis, dropping redundant rows.
        drop_rows = []
        for row in range(q):
            if basis[row] >= n_struct:
                pivots = np.nonzero(np.abs(tableau[row, :n_struct]) > PIVOT_TOL)[0]
                if pivots.size:
                    _pivot(tableau, row, int(pivots[0]))
                    basis[row] = int(pivots[0])
                else:
                    drop_rows.append(row)
        if drop_rows:
            keep = [r for r in range(q) if r not in drop_rows]
            tableau = tableau[keep]
            basis = [basis[r] for r in keep]
        tableau = np.hstack([tableau[:, :n_struct], tableau[:, -1:]])

    phase2_cost = np.concatenate([c, -c, np.zeros(q)])
    status, iters = _run_simplex(tableau, basis, phase2_cost, max_iters, iters)

    z_full = np.zeros(n_struct)
    for row, var in enumerate(basis):
        if var < n_struct:
            z_full[var] = tableau[row, -1]
    z = z_full[:p] - z_full[p:2 * p]
    if status is LpStatus.UNBOUNDED:
        return LpResult(z, float("-inf"), status, iters)
    return LpResult(z, float(c @ z), status, iters)
