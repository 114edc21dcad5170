"""Independent brute-force oracles used to validate the solvers.

Nothing here reuses the package's solve paths: LP values come from vertex
enumeration over row/bound intersections, MILP values from exhaustive
enumeration (plus scipy residual LPs for mixed problems), and inverse
optima from building the full cut LP and handing it to scipy.
"""

from __future__ import annotations

import itertools
import math

import numpy as np
from scipy.optimize import linprog


def enumerate_vertices(rows, rhs, lower, upper, feas_tol=1e-8):
    """All vertices of ``{rows @ x >= rhs, lower <= x <= upper}`` (finite bounds).

    Candidate points are intersections of ``k`` tight rows with ``n - k``
    variables pinned at a bound, filtered for feasibility.
    """
    rows = np.atleast_2d(np.asarray(rows, dtype=float))
    n = len(lower)
    if rows.size == 0:
        rows = rows.reshape(0, n)
    rhs = np.asarray(rhs, dtype=float)
    lower = np.asarray(lower, dtype=float)
    upper = np.asarray(upper, dtype=float)
    m = rows.shape[0]
    scale = max(1.0, float(np.abs(rhs).max()) if m else 1.0)
    vertices = []
    for k in range(0, min(m, n) + 1):
        for tight_rows in itertools.combinations(range(m), k):
            sub = rows[list(tight_rows)]
            for free_vars in itertools.combinations(range(n), k):
                fixed_vars = [j for j in range(n) if j not in free_vars]
                square = sub[:, list(free_vars)] if k else np.zeros((0, 0))
                if k and abs(np.linalg.det(square)) < 1e-10:
                    continue
                combos = list(itertools.product(*[(lower[j], upper[j]) for j in fixed_vars]))
                fixed_block = np.array(combos) if fixed_vars else np.zeros((1, 0))
                if k:
                    rhs_batch = rhs[list(tight_rows)] - fixed_block @ sub[:, fixed_vars].T
                    free_block = np.linalg.solve(square, rhs_batch.T).T
                else:
                    free_block = np.zeros((fixed_block.shape[0], 0))
                pts = np.empty((fixed_block.shape[0], n))
                pts[:, fixed_vars] = fixed_block
                pts[:, list(free_vars)] = free_block
                ok = np.all(pts >= lower - feas_tol * scale, axis=1)
                ok &= np.all(pts <= upper + feas_tol * scale, axis=1)
                if m:
                    ok &= np.all(pts @ rows.T >= rhs - feas_tol * scale, axis=1)
                vertices.extend(pts[ok])
    return np.array(vertices) if vertices else np.zeros((0, n))


def lp_value_by_vertex_enumeration(objective, rows, rhs, lower, upper):
    """Optimal value of a bounded-variable LP, or None when infeasible."""
    verts = enumerate_vertices(rows, rhs, lower, upper)
    if verts.shape[0] == 0:
        return None
    return float(np.min(verts @ np.asarray(objective, dtype=float)))


def enumerate_integer_points(problem, feas_tol=1e-9):
    """All integer-feasible points of a bounded pure-integer problem."""
    lo = problem.lower.astype(int)
    hi = problem.upper.astype(int)
    grids = np.meshgrid(*[np.arange(lo[j], hi[j] + 1) for j in range(problem.n)],
                        indexing="ij")
    pts = np.stack([g.ravel() for g in grids], axis=1).astype(float)
    a, b = problem.geq_rows()
    if a.shape[0]:
        pts = pts[np.all(pts @ a.T >= b - feas_tol, axis=1)]
    order = np.lexsort(pts.T[::-1])
    return pts[order]


def milp_value_by_enumeration(problem, objective):
    """Optimal MILP value by integer enumeration; None when infeasible.

    Continuous variables are optimized by a scipy residual LP for each
    integer assignment.
    """
    objective = np.asarray(objective, dtype=float)
    int_idx = np.flatnonzero(problem.is_integer)
    cont_idx = np.flatnonzero(~problem.is_integer)
    a, b = problem.geq_rows()
    best = None
    ranges = [np.arange(int(problem.lower[j]), int(problem.upper[j]) + 1) for j in int_idx]
    for assign in itertools.product(*ranges):
        z = np.array(assign, dtype=float)
        if cont_idx.size == 0:
            if a.shape[0] == 0 or np.all(a @ z >= b - 1e-9):
                val = float(objective @ z)
                best = val if best is None else min(best, val)
            continue
        res_rhs = b - a[:, int_idx] @ z if a.shape[0] else np.zeros(0)
        res = linprog(
            objective[cont_idx],
            A_ub=-a[:, cont_idx] if a.shape[0] else None,
            b_ub=-res_rhs if a.shape[0] else None,
            bounds=list(zip(problem.lower[cont_idx], problem.upper[cont_idx])),
            method="highs",
        )
        if res.status == 0:
            val = float(objective[int_idx] @ z + res.fun)
            best = val if best is None else min(best, val)
    return best


def mixed_feasible_pool(problem):
    """Forward-feasible points whose cuts describe the full inverse region.

    For each feasible integer assignment, the vertices of the residual
    continuous polytope are collected; their union contains every extreme
    point of the convex hull of the feasible region.
    """
    int_idx = np.flatnonzero(problem.is_integer)
    cont_idx = np.flatnonzero(~problem.is_integer)
    a, b = problem.geq_rows()
    pool = []
    ranges = [np.arange(int(problem.lower[j]), int(problem.upper[j]) + 1) for j in int_idx]
    for assign in itertools.product(*ranges):
        z = np.array(assign, dtype=float)
        if cont_idx.size == 0:
            if a.shape[0] == 0 or np.all(a @ z >= b - 1e-9):
                pool.append(z)
            continue
        res_rhs = b - a[:, int_idx] @ z if a.shape[0] else np.zeros(0)
        verts = enumerate_vertices(
            a[:, cont_idx] if a.shape[0] else np.zeros((0, cont_idx.size)),
            res_rhs,
            problem.lower[cont_idx],
            problem.upper[cont_idx],
        )
        for v in verts:
            full = np.empty(problem.n)
            full[int_idx] = z
            full[cont_idx] = v
            pool.append(full)
    return np.array(pool) if pool else np.zeros((0, problem.n))


def inverse_value_by_full_master(c0, x_hat, pool):
    """Optimal ``||c - c0||_1`` over all cuts at once, solved with scipy.

    Variables are the split ``c = c0 + u - v`` with ``u, v >= 0``; each pool
    point ``x`` contributes ``(u - v) @ (x_hat - x) <= -c0 @ (x_hat - x)``.
    """
    c0 = np.asarray(c0, dtype=float)
    x_hat = np.asarray(x_hat, dtype=float)
    n = c0.shape[0]
    diffs = x_hat - np.asarray(pool, dtype=float)
    a_ub = np.hstack([diffs, -diffs])
    b_ub = -diffs @ c0
    res = linprog(
        np.ones(2 * n),
        A_ub=a_ub,
        b_ub=b_ub,
        bounds=[(0, None)] * (2 * n),
        method="highs",
    )
    if res.status != 0:
        return None
    return float(res.fun)
