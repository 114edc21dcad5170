"""Master problem: the inverse-model relaxation over a finite cut pool.

The candidate cost is written as ``c = c0 + u - v`` with ``u, v >= 0`` so the
1-norm objective becomes ``sum(u) + sum(v)``; each pooled forward-feasible
point ``x`` contributes the constraint ``c @ (x_hat - x) <= 0``.  Optional
duality constraints ``y^T A = c, y >= 0`` (with variable bounds folded into
``A`` as explicit rows) keep every candidate's forward problem bounded.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .clock import WallClock
from .problem import DEFAULT_TOL, EQ, GE, LE, Cut, ForwardProblem, Row, Tolerances
from .simplex import (
    INFEASIBLE as LP_INFEASIBLE,
    OPTIMAL as LP_OPTIMAL,
    LinearProgram,
    SimplexSolver,
)
from .bb import InternalConsistencyError


class MasterInfeasible(RuntimeError):
    """The extra cost constraints exclude every pool-compatible cost vector.

    Because the master is a relaxation, this proves the full inverse problem
    infeasible as well.
    """


@dataclass(frozen=True)
class MasterConfig:
    use_duality_constraints: bool = False
    extra_c_constraints: tuple[Row, ...] = ()


@dataclass(frozen=True)
class MasterSolution:
    c: np.ndarray
    objective: float
    duals: np.ndarray | None = None


@dataclass(frozen=True)
class MultiMasterSolution:
    c: np.ndarray
    c_bars: tuple[np.ndarray, ...] | None
    objective: float


def _points(pool) -> list[np.ndarray]:
    out = []
    for entry in pool:
        out.append(entry.point if isinstance(entry, Cut) else np.asarray(entry, dtype=float))
    return out


def _extra_rows(constraints, c0, n, u_col, v_col, width):
    """Rows over ``c`` rewritten over the split variables, in >= form."""
    rows = []
    rhs = []
    for row in constraints:
        a = row.dense(n)
        base = float(a @ c0)
        line = np.zeros(width)
        line[u_col:u_col + n] = a
        line[v_col:v_col + n] = -a
        if row.relation in (GE, EQ):
            rows.append(line)
            rhs.append(row.rhs - base)
        if row.relation in (LE, EQ):
            rows.append(-line)
            rhs.append(-(row.rhs - base))
    return rows, rhs


def solve_master(
    c0: np.ndarray,
    x_hat: np.ndarray,
    pool,
    problem: ForwardProblem,
    cfg: MasterConfig = MasterConfig(),
    tol: Tolerances = DEFAULT_TOL,
    clock=None,
) -> MasterSolution:
    """Minimize ``||c - c0||_1`` subject to the pooled cuts (and duality/P)."""
    c0 = np.asarray(c0, dtype=float)
    x_hat = np.asarray(x_hat, dtype=float)
    n = c0.shape[0]
    points = _points(pool)
    for x in points:
        if x.shape != (n,):
            raise ValueError("pool point length must equal the variable count")

    if cfg.use_duality_constraints:
        a_all, _ = problem.geq_rows_with_bounds()
        n_dual = a_all.shape[0]
    else:
        a_all = None
        n_dual = 0
    width = 2 * n + n_dual
    rows, rhs = [], []
    for x in points:
        d = x_hat - x
        line = np.zeros(width)
        line[:n] = -d
        line[n:2 * n] = d
        rows.append(line)
        rhs.append(float(c0 @ d))
    if cfg.use_duality_constraints:
        # A^T y - u + v = c0, expanded to a >= pair per component
        for j in range(n):
            line = np.zeros(width)
            line[j] = -1.0
            line[n + j] = 1.0
            line[2 * n:] = a_all[:, j]
            rows.append(line)
            rhs.append(c0[j])
            rows.append(-line)
            rhs.append(-c0[j])
    extra_rows, extra_rhs = _extra_rows(cfg.extra_c_constraints, c0, n, 0, n, width)
    rows.extend(extra_rows)
    rhs.extend(extra_rhs)

    objective = np.zeros(width)
    objective[:2 * n] = 1.0
    lp = LinearProgram(
        objective,
        np.array(rows) if rows else np.zeros((0, width)),
        np.array(rhs),
        np.zeros(width),
        np.full(width, math.inf),
    )
    out = SimplexSolver(tol, clock if clock is not None else WallClock()).solve(lp)
    if out.status == LP_INFEASIBLE:
        if cfg.extra_c_constraints:
            raise MasterInfeasible("cost constraints conflict with the cut pool")
        raise InternalConsistencyError("master LP infeasible without extra constraints")
    if out.status != LP_OPTIMAL:
        raise InternalConsistencyError("master LP cannot be unbounded")
    c = c0 + out.x[:n] - out.x[n:2 * n]
    duals = out.x[2 * n:].copy() if cfg.use_duality_constraints else None
    return MasterSolution(c=c, objective=float(out.objective), duals=duals)


def solve_master_multi(
    c0: np.ndarray,
    data,
    lam: float | None,
    cfg: MasterConfig = MasterConfig(),
    tol: Tolerances = DEFAULT_TOL,
    clock=None,
) -> MultiMasterSolution:
    """Multi-point master over ``data = [(x_hat_d, pool_d), ...]``.

    With ``lam`` unset a single cost vector must satisfy every pool; with a
    regularizer each point gets its own inverse-feasible ``c_bar_d`` and the
    objective becomes ``||c - c0||_1 + lam * sum_d ||c_bar_d - c||_1``.
    """
    if cfg.use_duality_constraints:
        raise ValueError("duality constraints are only supported by the single-point master")
    c0 = np.asarray(c0, dtype=float)
    n = c0.shape[0]
    count = len(data)
    if lam is not None and lam < 0:
        raise ValueError("the regularization weight must be nonnegative")

    per_point = 0 if lam is None else 2 * n
    width = 2 * n + count * per_point
    rows, rhs = [], []
    for d_idx, (x_hat, pool) in enumerate(data):
        x_hat = np.asarray(x_hat, dtype=float)
        for x in _points(pool):
            d = x_hat - x
            line = np.zeros(width)
            line[:n] = -d
            line[n:2 * n] = d
            if lam is not None:
                s_col = 2 * n + d_idx * per_point
                line[s_col:s_col + n] = -d
                line[s_col + n:s_col + 2 * n] = d
            rows.append(line)
            rhs.append(float(c0 @ d))
    extra_rows, extra_rhs = _extra_rows(cfg.extra_c_constraints, c0, n, 0, n, width)
    rows.extend(extra_rows)
    rhs.extend(extra_rhs)

    objective = np.zeros(width)
    objective[:2 * n] = 1.0
    if lam is not None:
        objective[2 * n:] = lam
    lp = LinearProgram(
        objective,
        np.array(rows) if rows else np.zeros((0, width)),
        np.array(rhs),
        np.zeros(width),
        np.full(width, math.inf),
    )
    out = SimplexSolver(tol, clock if clock is not None else WallClock()).solve(lp)
    if out.status == LP_INFEASIBLE:
        if cfg.extra_c_constraints:
            raise MasterInfeasible("cost constraints conflict with the cut pools")
        raise InternalConsistencyError("multi-point master infeasible without extra constraints")
    if out.status != LP_OPTIMAL:
        raise InternalConsistencyError("multi-point master cannot be unbounded")
    c = c0 + out.x[:n] - out.x[n:2 * n]
    c_bars = None
    if lam is not None:
        c_bars = tuple(
            c + out.x[2 * n + d * per_point:2 * n + d * per_point + n]
            - out.x[2 * n + d * per_point + n:2 * n + (d + 1) * per_point]
            for d in range(count)
        )
    return MultiMasterSolution(c=c, c_bars=c_bars, objective=float(out.objective))
