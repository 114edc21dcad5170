"""Outer cutting plane loops and the named algorithm variants.

The single-point loop starts from the reference cost, alternately asking the
cut generation subroutine for a violated forward-feasible point and
re-solving the master over the accumulated pool, until the subroutine
verifies the candidate over the whole region.  The multi-point loop keeps one
pool and trust region per observed solution and re-solves the master once
enough violated points have been found in a sweep.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .clock import WallClock
from .cutgen import (
    DimReductionParams,
    SubroutineParams,
    Verified,
    generate_cut,
)
from .master import MasterConfig, MasterInfeasible, solve_master, solve_master_multi
from .problem import (
    DEFAULT_TOL,
    Cut,
    InfoSet,
    InverseInstance,
    Tolerances,
    TrustRegion,
    validate_instance,
)
from .rng import SeededRng

OPTIMAL = "optimal"
TIME_LIMIT = "time_limit"
ITERATION_LIMIT = "iteration_limit"
PROVED_INFEASIBLE = "proved_infeasible"

VARIANT_NAMES = ("CP", "CP-ES", "CPTR", "CPTR-ES", "CPTR-ES-DR")

_DEFAULT_EARLY_STOP = 5.0


@dataclass(frozen=True)
class VariantConfig:
    name: str
    params: SubroutineParams
    master: MasterConfig = MasterConfig()


def preset(name: str, seed: int = 0) -> VariantConfig:
    """Benchmark variant by name.

    ``CP`` is the classical cutting plane algorithm (the trust region is
    removed before every solve); ``CPTR`` the trust-region variant; the
    ``-ES`` suffix adds the 5-second early stop and ``-DR`` the stochastic
    dimensionality reduction.
    """
    classical = dict(removal_period=1, inner_limit=1)
    trust = dict(initial_size=1.0, growth=2.0, removal_period=10, inner_limit=2)
    table = {
        "CP": classical,
        "CP-ES": {**classical, "early_stop_seconds": _DEFAULT_EARLY_STOP},
        "CPTR": trust,
        "CPTR-ES": {**trust, "early_stop_seconds": _DEFAULT_EARLY_STOP},
        "CPTR-ES-DR": {
            **trust,
            "early_stop_seconds": _DEFAULT_EARLY_STOP,
            "dim_reduction": DimReductionParams(
                shrink_rate=0.03, dim_floor=0.8, empty_limit=10
            ),
        },
    }
    if name not in table:
        raise ValueError(f"unknown variant {name!r}; choose from {', '.join(VARIANT_NAMES)}")
    return VariantConfig(name=name, params=SubroutineParams(seed=seed, **table[name]))


@dataclass(frozen=True)
class Limits:
    time_limit: float | None = None
    max_iterations: int = 10000


@dataclass(frozen=True)
class IterationRecord:
    """One master/cut round; the data behind the per-instance trace."""

    index: int
    point: np.ndarray
    violation: float
    origin: str
    region_size: float
    master_objective: float
    cutgen_seconds: float
    master_seconds: float


@dataclass(frozen=True)
class SolveReport:
    status: str
    c_star: np.ndarray
    objective: float
    iterations: int
    subroutine_calls: int
    log: tuple[IterationRecord, ...]
    total_seconds: float
    cutgen_seconds: float = 0.0
    master_seconds: float = 0.0

    @property
    def cuts(self) -> int:
        return len(self.log)


@dataclass(frozen=True)
class MultiReport:
    status: str
    c_star: np.ndarray
    c_bars: tuple[np.ndarray, ...] | None
    objective: float
    cut_counts: tuple[int, ...]
    subroutine_calls: int
    total_seconds: float


def solve_inverse(
    inst: InverseInstance,
    variant: VariantConfig,
    limits: Limits = Limits(),
    tol: Tolerances = DEFAULT_TOL,
    clock=None,
) -> SolveReport:
    """Run the cutting plane algorithm on one instance.

    On a limit status the returned cost is the current relaxation candidate,
    which is not necessarily inverse-feasible.
    """
    report = validate_instance(inst, tol)
    if not report.ok:
        detail = "; ".join(str(v) for v in report.violations)
        raise ValueError(f"instance {inst.label!r} fails validation: {detail}")
    clock = clock if clock is not None else WallClock()
    rng = SeededRng(variant.params.seed)
    start = clock.now()
    problem = inst.problem
    info = InfoSet(TrustRegion.around(inst.x_hat, variant.params.initial_size))
    pool: list[Cut] = []
    log: list[IterationRecord] = []
    c = inst.c0.copy()
    calls = 0
    cutgen_total = 0.0
    master_total = 0.0
    status = OPTIMAL
    while True:
        if limits.time_limit is not None and clock.now() - start >= limits.time_limit:
            status = TIME_LIMIT
            break
        if len(pool) >= limits.max_iterations:
            status = ITERATION_LIMIT
            break
        mark = clock.now()
        result = generate_cut(c, inst.x_hat, problem, info, variant.params, rng, tol, clock)
        cut_seconds = clock.now() - mark
        cutgen_total += cut_seconds
        calls += 1
        if isinstance(result, Verified):
            status = OPTIMAL
            break
        info = result.info
        pool.append(Cut(result.point, result.violation, result.origin, result.region_size))
        mark = clock.now()
        try:
            master = solve_master(inst.c0, inst.x_hat, pool, problem, variant.master, tol, clock)
        except MasterInfeasible:
            status = PROVED_INFEASIBLE
            break
        master_seconds = clock.now() - mark
        master_total += master_seconds
        c = master.c
        log.append(
            IterationRecord(
                index=info.outer_index,
                point=result.point,
                violation=result.violation,
                origin=result.origin,
                region_size=result.region_size,
                master_objective=master.objective,
                cutgen_seconds=cut_seconds,
                master_seconds=master_seconds,
            )
        )
    return SolveReport(
        status=status,
        c_star=c,
        objective=float(np.abs(c - inst.c0).sum()),
        iterations=info.outer_index,
        subroutine_calls=calls,
        log=tuple(log),
        total_seconds=clock.now() - start,
        cutgen_seconds=cutgen_total,
        master_seconds=master_total,
    )


def solve_inverse_multi(
    instances,
    lam: float | None,
    v_star: int,
    variant: VariantConfig,
    limits: Limits = Limits(),
    tol: Tolerances = DEFAULT_TOL,
    clock=None,
) -> MultiReport:
    """Multi-point cutting plane loop over instances sharing dimension and prior."""
    instances = list(instances)
    if not instances:
        raise ValueError("at least one instance is required")
    count = len(instances)
    if not 1 <= v_star <= count:
        raise ValueError("v_star must lie in [1, number of instances]")
    n = instances[0].problem.n
    c0 = instances[0].c0
    for inst in instances:
        if inst.problem.n != n:
            raise ValueError("instances must share the variable count")
        if not np.array_equal(inst.c0, c0):
            raise ValueError("instances must share the reference cost")
        report = validate_instance(inst, tol)
        if not report.ok:
            raise ValueError(f"instance {inst.label!r} fails validation")

    clock = clock if clock is not None else WallClock()
    rng = SeededRng(variant.params.seed)
    start = clock.now()
    infos = [
        InfoSet(TrustRegion.around(inst.x_hat, variant.params.initial_size))
        for inst in instances
    ]
    pools: list[list[Cut]] = [[] for _ in instances]
    calls = 0
    status = OPTIMAL
    solution = None
    while True:
        try:
            solution = solve_master_multi(
                c0, [(inst.x_hat, pools[d]) for d, inst in enumerate(instances)],
                lam, variant.master, tol, clock,
            )
        except MasterInfeasible:
            status = PROVED_INFEASIBLE
            break
        candidates = solution.c_bars if solution.c_bars is not None else [solution.c] * count
        verified_count = 0
        violated_count = 0
        out_of_budget = False
        for d, inst in enumerate(instances):
            if limits.time_limit is not None and clock.now() - start >= limits.time_limit:
                status = TIME_LIMIT
                out_of_budget = True
                break
            if sum(len(p) for p in pools) >= limits.max_iterations:
                status = ITERATION_LIMIT
                out_of_budget = True
                break
            result = generate_cut(
                candidates[d], inst.x_hat, inst.problem, infos[d],
                variant.params, rng, tol, clock,
            )
            calls += 1
            if isinstance(result, Verified):
                infos[d] = result.info
                verified_count += 1
            else:
                infos[d] = result.info
                pools[d].append(
                    Cut(result.point, result.violation, result.origin, result.region_size)
                )
                violated_count += 1
            if violated_count >= v_star or verified_count + violated_count >= count:
                break
        if out_of_budget:
            break
        if verified_count == count:
            status = OPTIMAL
            break
    c_star = solution.c if solution is not None else c0.copy()
    return MultiReport(
        status=status,
        c_star=c_star,
        c_bars=solution.c_bars if solution is not None else None,
        objective=float(solution.objective) if solution is not None else 0.0,
        cut_counts=tuple(len(p) for p in pools),
        subroutine_calls=calls,
        total_seconds=clock.now() - start,
    )
