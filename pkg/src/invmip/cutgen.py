"""Trust-region cut generation.

Given a candidate cost vector, the subroutine repeatedly solves the forward
problem restricted to a trust region around the target point, growing or
removing the region until it either finds a forward-feasible point whose cut
is violated or proves, on a solve over the whole region, that none exists.

The region controls are small pure functions: :func:`maybe_remove` drops the
region on a fixed outer-iteration schedule and at the inner iteration limit,
:func:`grow` scales its size, :func:`keep_finite` retains the last finite
region for the next call, and :func:`stochastic_update` is the randomized
variant that also samples a coordinate subset, shrinking dimensionality as
the region grows.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .bb import (
    EARLY_STOP_FEASIBLE,
    INFEASIBLE as MILP_INFEASIBLE,
    OPTIMAL as MILP_OPTIMAL,
    UNBOUNDED_VIOLATION_ESCAPE,
    InternalConsistencyError,
    StopPolicy,
    solve_milp,
)
from .problem import (
    CUT_EARLY_STOP,
    CUT_FULL_REGION,
    CUT_TRUST_REGION,
    CUT_UNBOUNDED_ESCAPE,
    DEFAULT_TOL,
    ForwardProblem,
    InfoSet,
    Row,
    Tolerances,
    TrustRegion,
)
from .rng import SeededRng


@dataclass(frozen=True)
class DimReductionParams:
    shrink_rate: float = 0.03
    dim_floor: float = 0.8
    empty_limit: int = 10

    def __post_init__(self):
        if not 0 < self.shrink_rate < 1:
            raise ValueError("shrink_rate must lie in (0, 1)")
        if not 0 < self.dim_floor < 1:
            raise ValueError("dim_floor must lie in (0, 1)")
        if self.empty_limit < 1:
            raise ValueError("empty_limit must be at least 1")


@dataclass(frozen=True)
class SubroutineParams:
    initial_size: float = 1.0
    growth: float = 2.0
    removal_period: int = 10
    inner_limit: int = 2
    early_stop_seconds: float | None = None
    dim_reduction: DimReductionParams | None = None
    seed: int = 0
    violation_tol: float = 1e-6

    def __post_init__(self):
        if self.growth <= 1:
            raise ValueError("growth must exceed 1")
        if self.removal_period < 1 or self.inner_limit < 1:
            raise ValueError("removal_period and inner_limit must be at least 1")
        if self.violation_tol <= 0:
            raise ValueError("violation_tol must be positive")


@dataclass(frozen=True)
class Violated:
    """A forward-feasible point whose cut the candidate cost violates."""

    point: np.ndarray
    violation: float
    origin: str
    region_size: float
    info: InfoSet


@dataclass(frozen=True)
class Verified:
    """The candidate cost makes the target optimal over the whole region."""

    info: InfoSet


def maybe_remove(region: TrustRegion, outer_index: int, inner_index: int,
                 prm: SubroutineParams) -> TrustRegion:
    """Drop the region every ``removal_period`` outer iterations and when the
    inner loop reaches its limit; otherwise return it unchanged."""
    if inner_index < 1:
        raise ValueError("inner_index starts at 1")
    due_outer = outer_index > 0 and outer_index % prm.removal_period == 0
    if due_outer or inner_index == prm.inner_limit:
        return TrustRegion.removed(region.center)
    return region


def grow(region: TrustRegion, prm: SubroutineParams) -> TrustRegion:
    """Scale the region size by the growth factor, restoring full dimension."""
    if region.is_removed:
        raise ValueError("cannot grow a removed trust region")
    return TrustRegion.around(region.center, prm.growth * region.size)


def keep_finite(current: TrustRegion, previous: TrustRegion) -> TrustRegion:
    """The region to carry forward: the previous one if the current was removed."""
    return previous if current.is_removed else current


def reduced_dim_count(size: float, n: int, shrink_rate: float, dim_floor: float) -> int:
    """Coordinate-subset cardinality for a region of the given size."""
    return max(math.floor((1.0 - shrink_rate * (size - 1.0)) * n),
               math.floor(dim_floor * n))


def stochastic_update(region: TrustRegion, empty_count: int, prm: SubroutineParams,
                      rng: SeededRng) -> TrustRegion:
    """Randomized update after an empty subregion.

    Below the empty-streak limit a fresh coordinate subset of the same size is
    drawn; at the limit the full-dimensional region of the same size is tried;
    one past the limit the region grows and a subset for the new size is drawn.
    """
    dr = prm.dim_reduction
    if dr is None:
        raise ValueError("stochastic updates require dim_reduction parameters")
    if region.is_removed:
        raise ValueError("cannot update a removed trust region")
    n = region.center.shape[0]
    if empty_count == dr.empty_limit:
        return TrustRegion.around(region.center, region.size)
    if empty_count < dr.empty_limit:
        s = reduced_dim_count(region.size, n, dr.shrink_rate, dr.dim_floor)
        return TrustRegion(region.center, region.size, rng.subset(n, s))
    if empty_count == dr.empty_limit + 1:
        size = prm.growth * region.size
        s = reduced_dim_count(size, n, dr.shrink_rate, dr.dim_floor)
        return TrustRegion(region.center, size, rng.subset(n, s))
    raise ValueError("empty_count exceeded the streak limit; caller must reset it")


def encode_subregion(problem: ForwardProblem, region: TrustRegion) -> ForwardProblem:
    """Restriction of the problem to the trust region, as a plain problem view.

    Each active coordinate ``j`` gets a deviation variable ``d >= |x_j - center_j|``
    and their sum is capped by the region size; inactive coordinates are fixed
    at the center.  Projecting the augmented feasible set onto the original
    variables gives exactly the intersection of the region with the problem.
    """
    if region.is_removed:
        return problem
    n = problem.n
    active = region.active_dims
    nd = len(active)
    rows = list(problem.rows)
    for k, j in enumerate(active):
        center = region.center[j]
        rows.append(Row(((n + k, 1.0), (j, -1.0)), ">=", -center))
        rows.append(Row(((n + k, 1.0), (j, 1.0)), ">=", center))
    rows.append(Row(tuple((n + k, 1.0) for k in range(nd)), "<=", region.size))

    lower = np.concatenate([problem.lower, np.zeros(nd)])
    upper = np.concatenate([problem.upper, np.full(nd, region.size)])
    inactive = sorted(set(range(n)) - set(active))
    for j in inactive:
        value = region.center[j]
        if problem.is_integer[j]:
            value = round(value)
        lower[j] = value
        upper[j] = value
    is_integer = np.concatenate([problem.is_integer, np.zeros(nd, dtype=bool)])
    return ForwardProblem(
        name=problem.name + "+region",
        n=n + nd,
        rows=tuple(rows),
        lower=lower,
        upper=upper,
        is_integer=is_integer,
    )


def generate_cut(
    c_tilde: np.ndarray,
    x_hat: np.ndarray,
    problem: ForwardProblem,
    info: InfoSet,
    prm: SubroutineParams,
    rng: SeededRng,
    tol: Tolerances = DEFAULT_TOL,
    clock=None,
) -> Violated | Verified:
    """One subroutine invocation: find a violated forward-feasible point or verify.

    A candidate point counts as violated when its cut violation exceeds
    ``violation_tol * max(1, |c_tilde @ x_hat|)``; the same threshold is folded
    into the violation oracle handed to the forward solver so early stopping
    and the unbounded escape agree with the caller about what "violated" means.
    """
    c = np.asarray(c_tilde, dtype=float)
    x_hat = np.asarray(x_hat, dtype=float)
    n = problem.n
    threshold = prm.violation_tol * max(1.0, abs(float(c @ x_hat)))
    reference = float(c @ x_hat)

    def shifted_violation(x_aug: np.ndarray) -> float:
        return reference - float(c @ x_aug[:n]) - threshold

    policy = StopPolicy(
        early_stop_seconds=prm.early_stop_seconds,
        violation_oracle=shifted_violation,
    )
    previous = info.trust_region
    empty_count = info.empty_count
    inner = 1
    while True:
        region = maybe_remove(previous, info.outer_index, inner, prm)
        view = encode_subregion(problem, region)
        objective = np.concatenate([c, np.zeros(view.n - n)])
        outcome = solve_milp(view, objective, policy, tol, clock)

        if outcome.status == MILP_INFEASIBLE:
            raise InternalConsistencyError(
                "subregion reported infeasible although the target point is inside"
            )
        if outcome.status not in (MILP_OPTIMAL, EARLY_STOP_FEASIBLE, UNBOUNDED_VIOLATION_ESCAPE):
            raise InternalConsistencyError(f"unexpected forward status {outcome.status}")
        point = outcome.x[:n]
        violation = reference - float(c @ point)
        if outcome.status == UNBOUNDED_VIOLATION_ESCAPE:
            origin = CUT_UNBOUNDED_ESCAPE
        elif outcome.status == EARLY_STOP_FEASIBLE:
            origin = CUT_EARLY_STOP
        elif region.is_removed:
            origin = CUT_FULL_REGION
        else:
            origin = CUT_TRUST_REGION

        if violation > threshold:
            saved = keep_finite(region, previous)
            if prm.dim_reduction is not None and not region.is_removed:
                empty_count = 0
            return Violated(
                point=point,
                violation=violation,
                origin=origin,
                region_size=region.size,
                info=InfoSet(saved, info.outer_index + 1, empty_count),
            )
        if not region.is_removed:
            if prm.dim_reduction is not None:
                empty_count += 1
                previous = stochastic_update(region, empty_count, prm, rng)
                if empty_count == prm.dim_reduction.empty_limit + 1:
                    empty_count = 0
            else:
                previous = grow(region, prm)
            inner += 1
        else:
            return Verified(info=info)
