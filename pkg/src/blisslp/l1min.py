"""Weighted L1 minimization by linear programming.

Problems are stated as

    minimize_x  sum_i w_i | (A x - b)_i |

with sparse rows of A.  The solver rewrites this with one auxiliary bound
variable per row,

    minimize  sum_i w_i y_i   subject to   A x - y <= b,  -A x - y <= -b,

and hands the resulting standard-form LP to a pluggable backend.  The
default backend is the dense reference simplex from :mod:`blisslp.simplex`;
any callable with the same contract (``solve(c, G, h, max_iters)`` returning
an :class:`blisslp.simplex.LpResult`) can be substituted, e.g. the optional
:class:`ScipyLinprogSolver`.

The point x = 0, y = |b| is always feasible, so a valid solve never reports
worse than ``sum_i w_i |b_i|``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Protocol

import numpy as np

from .simplex import LpResult, LpStatus, solve_lp

__all__ = [
    "L1Problem",
    "L1Solution",
    "L1Status",
    "SolverOptions",
    "LpSolver",
    "ReferenceSimplexSolver",
    "ScipyLinprogSolver",
    "l1_minimize",
    "merge_duplicate_rows",
    "evaluate_objective",
    "dump_problem",
]

Row = tuple[tuple[int, float], ...]


class LpSolver(Protocol):
    """Backend contract: solve min c.z s.t. G z <= h over free z."""

    def solve(self, c: np.ndarray, G: np.ndarray, h: np.ndarray,
              max_iters: int) -> LpResult: ...


class ReferenceSimplexSolver:
    """Dense two-phase Bland-rule simplex shipped with the package."""

    def solve(self, c, G, h, max_iters):
        return solve_lp(c, G, h, max_iters)


class ScipyLinprogSolver:
    """Adapter around ``scipy.optimize.linprog`` (requires scipy)."""

    def __init__(self, method: str = "highs"):
        self.method = method

    def solve(self, c, G, h, max_iters):
        from scipy.optimize import linprog

        res = linprog(c, A_ub=G, b_ub=h, bounds=(None, None),
                      method=self.method, options={"maxiter": max_iters})
        status = {0: LpStatus.OPTIMAL, 1: LpStatus.ITERATION_LIMIT,
                  2: LpStatus.INFEASIBLE, 3: LpStatus.UNBOUNDED}.get(
                      res.status, LpStatus.ITERATION_LIMIT)
        z = np.asarray(res.x, dtype=float) if res.x is not None else np.zeros(G.shape[1])
        return LpResult(z, float(res.fun) if res.fun is not None else float("nan"),
                        status, int(getattr(res, "nit", 0)))


class L1Status(enum.Enum):
    OPTIMAL = "Optimal"
    INFEASIBLE = "Infeasible"
    ITERATION_LIMIT = "IterationLimit"


@dataclass(frozen=True)
class L1Problem:
    """Sparse weighted L1 objective ``sum_i weights[i] |(A x - b)_i|``.

    Attributes:
        n_vars: number of decision variables.
        rows: per-row sparse coefficients, each a tuple of (var index, value).
        b: right-hand sides, one per row.
        weights: strictly positive row weights.
        var_names: optional variable labels for dumps and debugging.
    """

    n_vars: int
    rows: tuple[Row, ...]
    b: np.ndarray
    weights: np.ndarray
    var_names: tuple[str, ...] | None = None

    def __post_init__(self) -> None:
        b = np.array(self.b, dtype=float)
        w = np.array(self.weights, dtype=float)
        rows = tuple(tuple((int(v), float(cf)) for v, cf in row) for row in self.rows)
        if len(rows) != b.size or b.size != w.size:
            raise ValueError("rows, b and weights must have equal length")
        if np.any(w <= 0):
            raise ValueError("weights must be strictly positive")
        for row in rows:
            for var, _ in row:
                if not 0 <= var < self.n_vars:
                    raise ValueError(f"variable index {var} out of range")
        if self.var_names is not None and len(self.var_names) != self.n_vars:
            raise ValueError("var_names length must equal n_vars")
        b.setflags(write=False)
        w.setflags(write=False)
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "weights", w)

    @property
    def n_rows(self) -> int:
        return len(self.rows)

    def dense_matrix(self) -> np.ndarray:
        a = np.zeros((self.n_rows, self.n_vars))
        for r, row in enumerate(self.rows):
            for var, coef in row:
                a[r, var] += coef
        return a


@dataclass(frozen=True)
class SolverOptions:
    """Knobs for :func:`l1_minimize`.

    ``max_iters=None`` means the default pivot budget 50 * (n_vars + n_rows).
    """

    max_iters: int | None = None
    tol: float = 1e-8
    solver: LpSolver | None = None


@dataclass(frozen=True)
class L1Solution:
    x_opt: np.ndarray
    objective: float
    iterations: int
    status: L1Status


def evaluate_objective(problem: L1Problem, x: np.ndarray) -> float:
    """Objective ``sum_i w_i |(A x - b)_i|`` at the point ``x``."""
    x = np.asarray(x, dtype=float)
    total = 0.0
    for row, b_i, w_i in zip(problem.rows, problem.b, problem.weights):
        residual = sum(coef * x[var] for var, coef in row) - b_i
        total += w_i * abs(residual)
    return float(total)


def merge_duplicate_rows(problem: L1Problem) -> L1Problem:
    """Combine rows with identical coefficients and right-hand side.

    Weights of merged rows are summed, which leaves the objective value of
    every point unchanged exactly.  Row order follows first occurrence.
    """
    index_of: dict[tuple, int] = {}
    rows: list[Row] = []
    b: list[float] = []
    weights: list[float] = []
    for row, b_i, w_i in zip(problem.rows, problem.b, problem.weights):
        key = (tuple(sorted(row)), float(b_i))
        if key in index_of:
            weights[index_of[key]] += float(w_i)
        else:
            index_of[key] = len(rows)
            rows.append(row)
            b.append(float(b_i))
            weights.append(float(w_i))
    return L1Problem(problem.n_vars, tuple(rows), np.array(b),
                     np.array(weights), problem.var_names)


def l1_minimize(problem: L1Problem,
                options: SolverOptions | None = None) -> L1Solution:
    """Globally minimize a weighted L1 objective.

    Returns an :class:`L1Solution`; a reported ITERATION_LIMIT carries the
    best point reached rather than raising.

    Raises:
        RuntimeError: if the backend reports infeasible or unbounded, which
            cannot happen for a well-formed L1 problem.
    """
    options = options or SolverOptions()
    n, m = problem.n_vars, problem.n_rows
    if m == 0:
        return L1Solution(np.zeros(n), 0.0, 0, L1Status.OPTIMAL)
    max_iters = options.max_iters if options.max_iters is not None else 50 * (n + m)
    solver = options.solver if options.solver is not None else ReferenceSimplexSolver()

    a = problem.dense_matrix()
    eye = np.eye(m)
    G = np.block([[a, -eye], [-a, -eye]])
    h = np.concatenate([problem.b, -problem.b])
    c = np.concatenate([np.zeros(n), problem.weights])

    result = solver.solve(c, G, h, max_iters)
    if result.status in (LpStatus.INFEASIBLE, LpStatus.UNBOUNDED):
        raise RuntimeError(
            f"LP backend reported {result.status.value} on an always-feasible "
            "bounded problem; the backend or problem data is broken")
    x = np.asarray(result.z[:n], dtype=float)
    if result.status is LpStatus.ITERATION_LIMIT and not np.all(np.isfinite(x)):
        x = np.zeros(n)
    status = (L1Status.OPTIMAL if result.status is LpStatus.OPTIMAL
              else L1Status.ITERATION_LIMIT)
    x.setflags(write=False)
    return L1Solution(x, evaluate_objective(problem, x), result.iterations, status)


def dump_problem(problem: L1Problem) -> str:
    """Serialize a problem in a plain-text sparse triplet format.

    Layout::

        l1problem 1
        vars <n_vars>
        rows <n_rows>
        name <var index> <label>      (optional, one per named variable)
        row <row index> <weight> <b>
        a <row index> <var index> <coefficient>

    Floats are printed with 17 significant digits so the dump is lossless.
    """
    out = ["l1problem 1",
           f"vars {problem.n_vars}",
           f"rows {problem.n_rows}"]
    if problem.var_names is not None:
        out.extend(f"name {i} {label}" for i, label in enumerate(problem.var_names))
    for r, (b_i, w_i) in enumerate(zip(problem.b, problem.weights)):
        out.append(f"row {r} {w_i:.17g} {b_i:.17g}")
    for r, row in enumerate(problem.rows):
        out.extend(f"a {r} {var} {coef:.17g}" for var, coef in row)
    return "\n".join(out) + "\n"
