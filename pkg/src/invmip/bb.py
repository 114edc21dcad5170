"""Branch-and-bound solver for the forward mixed-integer problems.

Branching is most-fractional with ties broken by lowest variable index; node
selection is best-bound with FIFO tie-breaking, so runs are fully
deterministic unless a time-based stop is configured.  Integer-feasible
points are streamed to an optional listener in discovery order, which is how
the cut generation layer implements early stopping: after the early-stop
deadline the most violated point found so far is returned, or the first
violated one found later.

When the root relaxation is unbounded and a violation oracle is present, the
search switches to diving along the unbounded ray (integer coordinates
rounded, continuous ones repaired by a residual LP) with geometrically
growing steps until a feasible point exceeds the big-violation threshold.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .clock import WallClock
from .problem import DEFAULT_TOL, ForwardProblem, Tolerances
from .simplex import (
    INFEASIBLE as LP_INFEASIBLE,
    OPTIMAL as LP_OPTIMAL,
    UNBOUNDED as LP_UNBOUNDED,
    LinearProgram,
    NumericalFailure,
    SimplexSolver,
)

OPTIMAL = "optimal"
EARLY_STOP_FEASIBLE = "early_stop_feasible"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"
UNBOUNDED_VIOLATION_ESCAPE = "unbounded_violation_escape"
TIME_LIMIT = "time_limit"

_MAX_DIVE_STEPS = 200


@dataclass
class StopPolicy:
    """Termination controls for one forward solve."""

    time_limit: float | None = None
    early_stop_seconds: float | None = None
    violation_oracle: Callable[[np.ndarray], float] | None = None
    big_violation_threshold: float = 1e10

    def __post_init__(self):
        if self.big_violation_threshold <= 0:
            raise ValueError("big_violation_threshold must be positive")


@dataclass(frozen=True)
class MilpOutcome:
    status: str
    x: np.ndarray | None = None
    objective: float | None = None
    best_bound: float | None = None
    node_count: int = 0
    wall_time: float = 0.0


class InternalConsistencyError(RuntimeError):
    """A solver state that should be unreachable was reached."""


def solve_milp(
    problem: ForwardProblem,
    objective: np.ndarray,
    policy: StopPolicy | None = None,
    tol: Tolerances = DEFAULT_TOL,
    clock=None,
) -> MilpOutcome:
    return solve_milp_with_incumbent_stream(problem, objective, None, policy, tol, clock)


def solve_milp_with_incumbent_stream(
    problem: ForwardProblem,
    objective: np.ndarray,
    listener: Callable[[np.ndarray], None] | None,
    policy: StopPolicy | None = None,
    tol: Tolerances = DEFAULT_TOL,
    clock=None,
) -> MilpOutcome:
    search = _Search(problem, objective, listener, policy or StopPolicy(), tol, clock)
    return search.run()


class _Search:
    def __init__(self, problem, objective, listener, policy, tol, clock):
        objective = np.asarray(objective, dtype=float)
        if objective.shape != (problem.n,):
            raise ValueError("objective length must equal the variable count")
        self.problem = problem
        self.objective = objective
        self.listener = listener
        self.policy = policy
        self.tol = tol
        self.clock = clock if clock is not None else WallClock()
        self.lp = SimplexSolver(tol, self.clock)
        self.rows, self.rhs = problem.geq_rows()
        self.int_idx = np.flatnonzero(problem.is_integer)
        self.node_count = 0
        self.incumbent = None
        self.incumbent_obj = math.inf
        self.found = []  # (discovery index, point, oracle value)
        self.past_deadline = False

    def run(self) -> MilpOutcome:
        self.t0 = self.clock.now()
        root = self._solve_node(self.problem.lower, self.problem.upper)
        if root.status == LP_INFEASIBLE:
            return self._outcome(INFEASIBLE)
        if root.status == LP_UNBOUNDED:
            if self.policy.violation_oracle is None:
                return self._outcome(UNBOUNDED)
            return self._escape_dive(root.ray)

        counter = 0
        heap = [(root.objective, counter, self.problem.lower, self.problem.upper, root)]
        best_open = root.objective
        while heap:
            best_open = heap[0][0]
            # while hunting for the first violated point past the early-stop
            # deadline, bound pruning would silently drop tied feasible points
            if not self.past_deadline and self.incumbent_obj - best_open <= self.tol.mip_gap:
                break
            stop = self._deadline_check(best_open)
            if stop is not None:
                return stop
            bound, _, lower, upper, outcome = heapq.heappop(heap)
            if not self.past_deadline and bound >= self.incumbent_obj - self.tol.mip_gap:
                continue
            self.node_count += 1
            self.clock.tick(1)
            branch_var = self._fractional_var(outcome.x)
            if branch_var < 0:
                point = self._snap(outcome.x)
                early = self._record_incumbent(point, outcome.objective)
                if early is not None:
                    return early
                continue
            value = outcome.x[branch_var]
            for child_lower, child_upper in self._children(lower, upper, branch_var, value):
                child = self._solve_node(child_lower, child_upper)
                if child.status == LP_INFEASIBLE:
                    continue
                if child.status != LP_OPTIMAL:
                    raise InternalConsistencyError("bounded node relaxation reported unbounded")
                if not self.past_deadline and child.objective >= self.incumbent_obj - self.tol.mip_gap:
                    continue
                counter += 1
                heapq.heappush(
                    heap, (child.objective, counter, child_lower, child_upper, child)
                )
        if self.incumbent is None:
            return self._outcome(INFEASIBLE)
        return self._outcome(OPTIMAL, best_bound=self.incumbent_obj)

    # node machinery -------------------------------------------------------

    def _solve_node(self, lower, upper):
        lp = LinearProgram(self.objective, self.rows, self.rhs, lower, upper)
        return self.lp.solve(lp)

    def _children(self, lower, upper, j, value):
        floor_upper = upper.copy()
        floor_upper[j] = math.floor(value)
        ceil_lower = lower.copy()
        ceil_lower[j] = math.ceil(value)
        return (lower, floor_upper), (ceil_lower, upper)

    def _fractional_var(self, x) -> int:
        best = -1
        best_dist = math.inf
        for j in self.int_idx:
            frac = x[j] - math.floor(x[j])
            if min(frac, 1 - frac) <= self.tol.integrality:
                continue
            dist = abs(frac - 0.5)
            if dist < best_dist - 1e-12:
                best_dist = dist
                best = int(j)
        return best

    def _snap(self, x):
        snapped = x.copy()
        snapped[self.int_idx] = np.round(snapped[self.int_idx])
        return snapped

    def _record_incumbent(self, point, objective):
        """Stream the point; return an outcome when it ends the search."""
        if self.listener is not None:
            self.listener(point.copy())
        value = None
        if self.policy.violation_oracle is not None:
            value = self.policy.violation_oracle(point)
        self.found.append((len(self.found), point, value))
        if objective < self.incumbent_obj:
            self.incumbent = point
            self.incumbent_obj = objective
        if value is not None and self.past_deadline and value > 0:
            return MilpOutcome(
                status=EARLY_STOP_FEASIBLE,
                x=point,
                objective=float(self.objective @ point),
                best_bound=None,
                node_count=self.node_count,
                wall_time=self.clock.now() - self.t0,
            )
        return None

    def _deadline_check(self, best_open):
        policy = self.policy
        elapsed = self.clock.now() - self.t0
        if policy.early_stop_seconds is not None and elapsed > policy.early_stop_seconds:
            best = None
            for _, point, value in self.found:
                if value is not None and value > 0:
                    if best is None or value > best[1]:
                        best = (point, value)
            if best is not None:
                return MilpOutcome(
                    status=EARLY_STOP_FEASIBLE,
                    x=best[0],
                    objective=float(self.objective @ best[0]),
                    best_bound=best_open,
                    node_count=self.node_count,
                    wall_time=elapsed,
                )
            self.past_deadline = True
        if policy.time_limit is not None and elapsed >= policy.time_limit:
            return MilpOutcome(
                status=TIME_LIMIT,
                x=self.incumbent,
                objective=self.incumbent_obj if self.incumbent is not None else None,
                best_bound=best_open,
                node_count=self.node_count,
                wall_time=elapsed,
            )
        return None

    def _outcome(self, status, best_bound=None):
        return MilpOutcome(
            status=status,
            x=self.incumbent,
            objective=self.incumbent_obj if self.incumbent is not None else None,
            best_bound=best_bound,
            node_count=self.node_count,
            wall_time=self.clock.now() - self.t0,
        )

    # unbounded escape -------------------------------------------------------

    def _escape_dive(self, ray):
        """Walk integer roundings of the unbounded ray until the violation
        threshold triggers, repairing continuous coordinates with LPs."""
        oracle = self.policy.violation_oracle
        threshold = self.policy.big_violation_threshold
        start = self._feasible_point(self.problem.lower, self.problem.upper)
        if start is None:
            raise InternalConsistencyError("unbounded root but no feasible point")
        for k in range(_MAX_DIVE_STEPS):
            self.node_count += 1
            self.clock.tick(1)
            cand = start + (2.0**k) * ray
            lower = self.problem.lower.copy()
            upper = self.problem.upper.copy()
            target = np.clip(
                np.round(cand[self.int_idx]), lower[self.int_idx], upper[self.int_idx]
            )
            lower[self.int_idx] = target
            upper[self.int_idx] = target
            node = self._solve_node(lower, upper)
            if node.status == LP_INFEASIBLE:
                continue
            if node.status == LP_UNBOUNDED:
                point = self._ride_continuous_ray(lower, upper, node.ray)
                if point is None:
                    continue
            else:
                point = self._snap(node.x)
            if self.listener is not None:
                self.listener(point.copy())
            if oracle(point) > threshold:
                return MilpOutcome(
                    status=UNBOUNDED_VIOLATION_ESCAPE,
                    x=point,
                    objective=float(self.objective @ point),
                    best_bound=None,
                    node_count=self.node_count,
                    wall_time=self.clock.now() - self.t0,
                )
        raise NumericalFailure("unbounded escape dive failed to reach the threshold")

    def _ride_continuous_ray(self, lower, upper, ray):
        base = self._feasible_point(lower, upper)
        if base is None:
            return None
        oracle = self.policy.violation_oracle
        threshold = self.policy.big_violation_threshold
        for k in range(_MAX_DIVE_STEPS):
            point = base + (2.0**k) * ray
            if oracle(point) > threshold:
                return self._snap(point)
        return None

    def _feasible_point(self, lower, upper):
        lp = LinearProgram(np.zeros(self.problem.n), self.rows, self.rhs, lower, upper)
        out = self.lp.solve(lp)
        if out.status != LP_OPTIMAL:
            return None
        return out.x
