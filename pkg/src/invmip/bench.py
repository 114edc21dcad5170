"""Instance generation, benchmark execution, and performance profiles.

Instances are manufactured the way the test bank is built: the problem is
solved under a random cost vector drawn uniformly from ``[-1, 1)`` per
component, the solution becomes the target point, and the problem's own
objective becomes the reference cost.  Problems that cannot produce the
requested number of targets within the attempt budget are dropped.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .bb import OPTIMAL as MILP_OPTIMAL, StopPolicy, solve_milp
from .clock import TickClock
from .driver import Limits, VariantConfig, solve_inverse
from .problem import DEFAULT_TOL, ForwardProblem, InverseInstance, Tolerances
from .rng import SeededRng

RESULTS_FIELDS = (
    "instance", "variant", "status", "objective",
    "iterations", "cuts", "total_s", "cutgen_s", "master_s",
)
PROFILE_FIELDS = ("variant", "x", "y", "curve_kind")

RATIO_GRID = tuple(float(2**k) for k in range(11))  # log grid over [1, 1024]


@dataclass(frozen=True)
class Dropped:
    """Marker: the problem failed to yield enough targets within the budget."""

    problem_name: str
    attempts: int


@dataclass(frozen=True)
class BenchResultRow:
    instance: str
    variant: str
    status: str
    objective: float
    iterations: int
    cuts: int
    total_s: float
    cutgen_s: float
    master_s: float


def generate_instances(
    problem: ForwardProblem,
    seed: int,
    time_limit: float | None = None,
    attempts: int = 10,
    count: int = 3,
    tol: Tolerances = DEFAULT_TOL,
    clock=None,
) -> list[InverseInstance] | Dropped:
    """Draw target points by solving under random costs; see the module doc."""
    if problem.objective is None:
        raise ValueError(
            f"problem {problem.name!r} carries no objective to use as the reference cost"
        )
    rng = SeededRng(seed)
    instances: list[InverseInstance] = []
    for _ in range(attempts):
        if len(instances) >= count:
            break
        random_cost = np.array([rng.symmetric_uniform() for _ in range(problem.n)])
        outcome = solve_milp(
            problem, random_cost, StopPolicy(time_limit=time_limit), tol, clock
        )
        if outcome.status != MILP_OPTIMAL:
            continue
        label = f"{problem.name}_t{len(instances) + 1}"
        instances.append(
            InverseInstance(problem, c0=problem.objective, x_hat=outcome.x, label=label)
        )
    if len(instances) < count:
        return Dropped(problem_name=problem.name, attempts=attempts)
    return instances


def run_bench(
    instances,
    variants,
    time_limit: float | None = None,
    out=None,
    tol: Tolerances = DEFAULT_TOL,
    clock_factory=TickClock,
) -> list[BenchResultRow]:
    """One row per (instance, variant), in deterministic sorted order.

    Each cell gets a fresh clock so recorded times are independent of the
    execution order.
    """
    cells = sorted(
        ((inst, variant) for inst in instances for variant in variants),
        key=lambda cell: (cell[0].label, cell[1].name),
    )
    rows = []
    for inst, variant in cells:
        report = solve_inverse(
            inst, variant, Limits(time_limit=time_limit), tol, clock_factory()
        )
        rows.append(
            BenchResultRow(
                instance=inst.label,
                variant=variant.name,
                status=report.status,
                objective=report.objective,
                iterations=report.subroutine_calls,
                cuts=report.cuts,
                total_s=report.total_seconds,
                cutgen_s=report.cutgen_seconds,
                master_s=report.master_seconds,
            )
        )
    if out is not None:
        write_results_csv(rows, out)
    return rows


def _fmt(value: float) -> str:
    return repr(float(value))


def write_results_csv(rows, path) -> None:
    lines = [",".join(RESULTS_FIELDS)]
    for row in rows:
        lines.append(
            ",".join(
                (
                    row.instance,
                    row.variant,
                    row.status,
                    _fmt(row.objective),
                    str(row.iterations),
                    str(row.cuts),
                    _fmt(row.total_s),
                    _fmt(row.cutgen_s),
                    _fmt(row.master_s),
                )
            )
        )
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")


def read_results_csv(path) -> list[BenchResultRow]:
    rows = []
    with open(path, newline="", encoding="utf-8") as handle:
        for record in csv.DictReader(handle):
            rows.append(
                BenchResultRow(
                    instance=record["instance"],
                    variant=record["variant"],
                    status=record["status"],
                    objective=float(record["objective"]),
                    iterations=int(record["iterations"]),
                    cuts=int(record["cuts"]),
                    total_s=float(record["total_s"]),
                    cutgen_s=float(record["cutgen_s"]),
                    master_s=float(record["master_s"]),
                )
            )
    return rows


def performance_profile(rows) -> list[tuple[str, float, float, str]]:
    """Two curve families from a results table.

    ``times``: per variant, the sorted solve times with cumulative solved
    counts.  ``ratio``: for each factor on a log grid over [1, 1024], the
    fraction of all instances the variant solved within that factor of the
    per-instance best time.
    """
    if not rows:
        raise ValueError("no result rows to profile")
    variants = sorted({row.variant for row in rows})
    all_instances = sorted({row.instance for row in rows})
    solved = {
        (row.instance, row.variant): row.total_s
        for row in rows
        if row.status == "optimal"
    }
    best: dict[str, float] = {}
    for (instance, _), seconds in solved.items():
        if instance not in best or seconds < best[instance]:
            best[instance] = seconds

    curves: list[tuple[str, float, float, str]] = []
    for variant in variants:
        times = sorted(
            seconds for (_, var), seconds in solved.items() if var == variant
        )
        for k, seconds in enumerate(times, start=1):
            curves.append((variant, seconds, float(k), "times"))
    denominator = float(len(all_instances))
    for variant in variants:
        for theta in RATIO_GRID:
            hits = sum(
                1
                for instance in all_instances
                if (instance, variant) in solved
                and solved[(instance, variant)] <= theta * max(best[instance], 1e-12)
            )
            curves.append((variant, theta, hits / denominator, "ratio"))
    return curves


def write_profile_csv(curves, path) -> None:
    lines = [",".join(PROFILE_FIELDS)]
    for variant, x, y, kind in curves:
        lines.append(",".join((variant, _fmt(x), _fmt(y), kind)))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")
