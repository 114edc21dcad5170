"""Dense bounded-variable primal simplex.

Two-phase method on the slack form ``A x - s = b`` with per-variable bounds.
Pricing is Dantzig's rule, switching permanently to Bland's rule after
``10 * (m + n)`` iterations without objective improvement.  Ties in the ratio
test are broken by lowest row index and pricing ties by lowest column index,
which pins the solve path for reproducibility.  The basis inverse is kept
explicitly and refactorized from scratch every 50 pivots.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .clock import WallClock
from .problem import DEFAULT_TOL, Tolerances

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"

_AT_LOWER = 0
_AT_UPPER = 1
_FREE = 2
_BASIC = 3

_REFACTOR_EVERY = 50


class NumericalFailure(RuntimeError):
    """Pivoting stalled beyond the anti-cycling iteration cap."""


@dataclass(frozen=True)
class LinearProgram:
    """``min objective @ x`` subject to ``rows @ x >= rhs`` and bounds."""

    objective: np.ndarray
    rows: np.ndarray
    rhs: np.ndarray
    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        obj = np.asarray(self.objective, dtype=float)
        rows = np.atleast_2d(np.asarray(self.rows, dtype=float))
        if rows.size == 0:
            rows = rows.reshape(0, obj.shape[0])
        rhs = np.asarray(self.rhs, dtype=float).reshape(-1)
        lower = np.asarray(self.lower, dtype=float)
        upper = np.asarray(self.upper, dtype=float)
        n = obj.shape[0]
        if rows.shape[1] != n or rhs.shape[0] != rows.shape[0]:
            raise ValueError("inconsistent LP dimensions")
        if lower.shape != (n,) or upper.shape != (n,):
            raise ValueError("bounds must match objective length")
        for arr, name in ((obj, "objective"), (rows, "rows"), (rhs, "rhs"),
                          (lower, "lower"), (upper, "upper")):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)


@dataclass(frozen=True)
class LpOutcome:
    status: str
    x: np.ndarray | None = None
    objective: float | None = None
    duals: np.ndarray | None = None
    ray: np.ndarray | None = None


class SimplexSolver:
    """Holds mutable pivot workspace; use one instance per thread of execution."""

    def __init__(self, tol: Tolerances = DEFAULT_TOL, clock=None):
        self.tol = tol
        self.clock = clock if clock is not None else WallClock()

    def solve(self, lp: LinearProgram) -> LpOutcome:
        m, nv = lp.rows.shape
        n_slack = m
        n_real = nv + n_slack
        cols = np.hstack([lp.rows, -np.eye(m)]) if m else np.zeros((0, n_real))
        lower = np.concatenate([lp.lower, np.zeros(n_slack)])
        upper = np.concatenate([lp.upper, np.full(n_slack, math.inf)])

        vstat = np.empty(n_real, dtype=np.int8)
        values = np.zeros(n_real)
        for j in range(n_real):
            if math.isfinite(lower[j]):
                vstat[j] = _AT_LOWER
                values[j] = lower[j]
            elif math.isfinite(upper[j]):
                vstat[j] = _AT_UPPER
                values[j] = upper[j]
            else:
                vstat[j] = _FREE
                values[j] = 0.0

        residual = lp.rhs - cols @ values if m else np.zeros(0)
        signs = np.where(residual >= 0, 1.0, -1.0)
        art = np.zeros((m, m))
        np.fill_diagonal(art, signs)
        self._cols = np.hstack([cols, art]) if m else cols
        self._lower = np.concatenate([lower, np.zeros(m)])
        self._upper = np.concatenate([upper, np.full(m, math.inf)])
        self._vstat = np.concatenate([vstat, np.full(m, _BASIC, dtype=np.int8)])
        self._values = np.concatenate([values, np.abs(residual)])
        self._basis = np.arange(n_real, n_real + m)
        self._binv = np.zeros((m, m))
        np.fill_diagonal(self._binv, signs)
        self._pivots = 0
        self._n_total = n_real + m
        self._m = m
        self._nv = nv
        self._rhs = lp.rhs
        self._first_artificial = n_real

        phase1_cost = np.zeros(self._n_total)
        phase1_cost[n_real:] = 1.0
        status = self._iterate(phase1_cost, phase=1)
        if status != OPTIMAL:
            raise NumericalFailure("phase 1 reported unbounded")
        scale = max(1.0, float(np.abs(lp.rhs).max()) if m else 1.0)
        if self._objective(phase1_cost) > self.tol.feasibility * scale:
            return LpOutcome(status=INFEASIBLE)
        self._drive_out_artificials(n_real)
        self._lower[n_real:] = 0.0
        self._upper[n_real:] = 0.0

        phase2_cost = np.zeros(self._n_total)
        phase2_cost[:nv] = lp.objective
        status = self._iterate(phase2_cost, phase=2)
        if status == UNBOUNDED:
            return LpOutcome(status=UNBOUNDED, ray=self._ray[:nv].copy())
        x = self._values[:nv].copy()
        duals = self._binv.T @ phase2_cost[self._basis] if m else np.zeros(0)
        return LpOutcome(
            status=OPTIMAL,
            x=x,
            objective=float(lp.objective @ x),
            duals=duals,
        )

    # internal machinery ---------------------------------------------------

    def _objective(self, cost: np.ndarray) -> float:
        return float(cost @ self._values)

    def _refactorize(self):
        if self._m:
            self._binv = np.linalg.inv(self._cols[:, self._basis])

    def _recompute_basics(self, rhs: np.ndarray):
        if not self._m:
            return
        nonbasic = self._vstat != _BASIC
        partial = rhs - self._cols[:, nonbasic] @ self._values[nonbasic]
        self._values[self._basis] = self._binv @ partial

    def _drive_out_artificials(self, n_real: int):
        ptol = self.tol.pivot
        for r in range(self._m):
            if self._basis[r] < n_real:
                continue
            row = self._binv[r] @ self._cols
            pivot_col = -1
            for j in range(n_real):
                if self._vstat[j] != _BASIC and abs(row[j]) > ptol:
                    pivot_col = j
                    break
            if pivot_col < 0:
                continue  # redundant row; artificial stays pinned at zero
            leaving = self._basis[r]
            w = self._binv @ self._cols[:, pivot_col]
            self._vstat[leaving] = _AT_LOWER
            self._values[leaving] = 0.0
            self._basis[r] = pivot_col
            self._vstat[pivot_col] = _BASIC
            self._update_binv(r, w)

    def _update_binv(self, r: int, w: np.ndarray):
        piv = w[r]
        self._binv[r] /= piv
        for i in range(self._m):
            if i != r and w[i] != 0.0:
                self._binv[i] -= w[i] * self._binv[r]
        self._pivots += 1
        self.clock.tick(1)
        if self._pivots % _REFACTOR_EVERY == 0:
            self._refactorize()
            self._recompute_basics(self._rhs)

    def _iterate(self, cost: np.ndarray, phase: int) -> str:
        m = self._m
        dtol = 1e-9
        ptol = self.tol.pivot
        stall_limit = 10 * (m + self._nv)
        max_iterations = 10000 + 200 * self._n_total
        bland = False
        best_obj = math.inf
        stalled = 0

        for _ in range(max_iterations):
            y = self._binv.T @ cost[self._basis] if m else np.zeros(0)
            reduced = cost - (y @ self._cols if m else 0.0)
            stat = self._vstat
            enter_down = (stat == _AT_UPPER) & (reduced > dtol)
            enter_up = ((stat == _AT_LOWER) & (reduced < -dtol)) | (
                (stat == _FREE) & (np.abs(reduced) > dtol)
            )
            candidates = (enter_up | enter_down) & (self._upper != self._lower)
            if not candidates.any():
                return OPTIMAL

            if bland:
                q = int(np.flatnonzero(candidates)[0])
            else:
                score = np.where(candidates, np.abs(reduced), 0.0)
                q = int(np.argmax(score))
            if stat[q] == _AT_UPPER or (stat[q] == _FREE and reduced[q] > 0):
                sigma = -1.0
            else:
                sigma = 1.0

            w = self._binv @ self._cols[:, q] if m else np.zeros(0)
            step = sigma * w
            xb = self._values[self._basis] if m else np.zeros(0)
            ratios = np.full(m, math.inf)
            for i in range(m):
                bi = self._basis[i]
                if step[i] > ptol:
                    if math.isfinite(self._lower[bi]):
                        ratios[i] = max(xb[i] - self._lower[bi], 0.0) / step[i]
                elif step[i] < -ptol:
                    if math.isfinite(self._upper[bi]):
                        ratios[i] = max(self._upper[bi] - xb[i], 0.0) / -step[i]
            t_basic = float(ratios.min()) if m else math.inf
            span = self._upper[q] - self._lower[q]
            t_enter = span if math.isfinite(span) else math.inf

            if t_enter <= t_basic:
                if math.isinf(t_enter):
                    if phase == 1:
                        raise NumericalFailure("phase 1 unbounded")
                    self._ray = self._direction(q, sigma, w)
                    return UNBOUNDED
                # bound flip: no basis change
                if m:
                    self._values[self._basis] = xb - t_enter * step
                self._values[q] += sigma * t_enter
                self._vstat[q] = _AT_UPPER if self._vstat[q] == _AT_LOWER else _AT_LOWER
                self.clock.tick(1)
            else:
                r = int(np.argmin(ratios))
                t = t_basic
                leaving = self._basis[r]
                if m:
                    self._values[self._basis] = xb - t * step
                self._values[q] += sigma * t
                self._vstat[leaving] = _AT_LOWER if step[r] > 0 else _AT_UPPER
                self._values[leaving] = (
                    self._lower[leaving] if step[r] > 0 else self._upper[leaving]
                )
                self._basis[r] = q
                self._vstat[q] = _BASIC
                if phase == 1 and leaving >= self._first_artificial:
                    # an artificial that leaves the basis never returns
                    self._upper[leaving] = 0.0
                    self._values[leaving] = 0.0
                self._update_binv(r, w)

            obj = self._objective(cost)
            if obj < best_obj - 1e-12:
                best_obj = obj
                stalled = 0
            else:
                stalled += 1
                if stalled > stall_limit:
                    bland = True
        raise NumericalFailure("simplex iteration cap exceeded")

    def _direction(self, q: int, sigma: float, w: np.ndarray) -> np.ndarray:
        ray = np.zeros(self._n_total)
        ray[q] = sigma
        if self._m:
            ray[self._basis] = -sigma * w
        return ray


def solve_lp(lp: LinearProgram, tol: Tolerances = DEFAULT_TOL, clock=None) -> LpOutcome:
    """Solve one LP with a fresh workspace."""
    return SimplexSolver(tol, clock).solve(lp)
