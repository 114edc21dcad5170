"""Problem and instance data model shared by all solver components.

A :class:`ForwardProblem` stores a mixed-integer linear feasible region in
the mixed-relation form in which it was written (rows may be ``>=``, ``<=``
or ``=``); solver-facing code works with the normalized ``>=`` view produced
by :meth:`ForwardProblem.geq_rows`.  Infinite bounds are represented by
``math.inf`` exactly, never by a large finite number, so unboundedness
detection stays exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Iterable, Sequence

import numpy as np

INF = math.inf

GE = ">="
LE = "<="
EQ = "="

_RELATIONS = (GE, LE, EQ)


@dataclass(frozen=True)
class Tolerances:
    """Numeric tolerances used across the package."""

    feasibility: float = 1e-7
    integrality: float = 1e-6
    violation: float = 1e-6
    mip_gap: float = 1e-6
    duality_gap: float = 1e-7
    pivot: float = 1e-9
    cone: float = 1e-8


DEFAULT_TOL = Tolerances()


@dataclass(frozen=True)
class Row:
    """One linear constraint, stored sparsely as ``(index, coefficient)`` pairs."""

    coeffs: tuple[tuple[int, float], ...]
    relation: str
    rhs: float

    def __post_init__(self):
        if self.relation not in _RELATIONS:
            raise ValueError(f"unknown relation {self.relation!r}")
        object.__setattr__(
            self,
            "coeffs",
            tuple((int(j), float(v)) for j, v in self.coeffs),
        )
        object.__setattr__(self, "rhs", float(self.rhs))

    def dense(self, n: int) -> np.ndarray:
        a = np.zeros(n)
        for j, v in self.coeffs:
            a[j] += v
        return a

    def residual(self, x: np.ndarray) -> float:
        """Signed slack of the row at ``x``; nonnegative means satisfied for >=."""
        lhs = float(sum(v * x[j] for j, v in self.coeffs))
        if self.relation == GE:
            return lhs - self.rhs
        if self.relation == LE:
            return self.rhs - lhs
        return -abs(lhs - self.rhs)


def _as_float_array(values, n: int, what: str) -> np.ndarray:
    arr = np.asarray(values, dtype=float)
    if arr.shape != (n,):
        raise ValueError(f"{what} must have length {n}, got shape {arr.shape}")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class ForwardProblem:
    """Constraint data of the forward region: rows, bounds and integrality.

    ``objective`` optionally carries the problem's own cost vector (as read
    from an MPS file); the instance generator uses it as the reference cost.
    """

    name: str
    n: int
    rows: tuple[Row, ...]
    lower: np.ndarray
    upper: np.ndarray
    is_integer: np.ndarray
    objective: np.ndarray | None = None

    def __post_init__(self):
        object.__setattr__(self, "rows", tuple(self.rows))
        object.__setattr__(self, "lower", _as_float_array(self.lower, self.n, "lower"))
        object.__setattr__(self, "upper", _as_float_array(self.upper, self.n, "upper"))
        mask = np.asarray(self.is_integer, dtype=bool)
        if mask.shape != (self.n,):
            raise ValueError("is_integer must have length n")
        mask.setflags(write=False)
        object.__setattr__(self, "is_integer", mask)
        if self.objective is not None:
            object.__setattr__(
                self, "objective", _as_float_array(self.objective, self.n, "objective")
            )
        for r, row in enumerate(self.rows):
            for j, _ in row.coeffs:
                if not 0 <= j < self.n:
                    raise ValueError(f"row {r} references variable {j} outside [0, {self.n})")
        if np.any(self.lower > self.upper):
            bad = int(np.argmax(self.lower > self.upper))
            raise ValueError(f"lower[{bad}] > upper[{bad}]")

    @property
    def continuous_count(self) -> int:
        return int(np.count_nonzero(~self.is_integer))

    def geq_rows(self) -> tuple[np.ndarray, np.ndarray]:
        """Dense ``A, b`` with every row normalized to ``A x >= b``.

        Equality rows expand to a ``>=`` / ``<=`` pair so the feasible set is
        preserved exactly; the stored rows are never rewritten.
        """
        coeffs = []
        rhs = []
        for row in self.rows:
            a = row.dense(self.n)
            if row.relation == GE:
                coeffs.append(a)
                rhs.append(row.rhs)
            elif row.relation == LE:
                coeffs.append(-a)
                rhs.append(-row.rhs)
            else:
                coeffs.append(a)
                rhs.append(row.rhs)
                coeffs.append(-a)
                rhs.append(-row.rhs)
        if not coeffs:
            return np.zeros((0, self.n)), np.zeros(0)
        return np.array(coeffs), np.array(rhs)

    def geq_rows_with_bounds(self) -> tuple[np.ndarray, np.ndarray]:
        """Normalized ``>=`` rows with all finite variable bounds folded in as rows."""
        a, b = self.geq_rows()
        extra_a = []
        extra_b = []
        for j in range(self.n):
            if math.isfinite(self.lower[j]):
                e = np.zeros(self.n)
                e[j] = 1.0
                extra_a.append(e)
                extra_b.append(self.lower[j])
            if math.isfinite(self.upper[j]):
                e = np.zeros(self.n)
                e[j] = -1.0
                extra_a.append(e)
                extra_b.append(-self.upper[j])
        if extra_a:
            a = np.vstack([a, extra_a]) if a.size else np.array(extra_a)
            b = np.concatenate([b, extra_b])
        return a, b

    def point_violations(self, x: np.ndarray, tol: Tolerances = DEFAULT_TOL) -> list["Violation"]:
        """All row/bound/integrality violations of ``x`` beyond tolerance."""
        x = np.asarray(x, dtype=float)
        if x.shape != (self.n,):
            raise ValueError(f"point must have length {self.n}")
        found = []
        for r, row in enumerate(self.rows):
            res = row.residual(x)
            if res < -tol.feasibility:
                found.append(Violation("row", r, -res))
        for j in range(self.n):
            if x[j] < self.lower[j] - tol.feasibility:
                found.append(Violation("lower", j, self.lower[j] - x[j]))
            if x[j] > self.upper[j] + tol.feasibility:
                found.append(Violation("upper", j, x[j] - self.upper[j]))
            if self.is_integer[j] and abs(x[j] - round(x[j])) > tol.integrality:
                found.append(Violation("integrality", j, abs(x[j] - round(x[j]))))
        return found

    def is_feasible(self, x: np.ndarray, tol: Tolerances = DEFAULT_TOL) -> bool:
        return not self.point_violations(x, tol)


@dataclass(frozen=True)
class Violation:
    kind: str
    index: int
    residual: float

    def __str__(self):
        return f"{self.kind}[{self.index}] violated by {self.residual:.3g}"


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    violations: tuple[Violation, ...] = ()


@dataclass(frozen=True)
class InverseInstance:
    """A forward problem together with the reference cost and target solution."""

    problem: ForwardProblem
    c0: np.ndarray
    x_hat: np.ndarray
    label: str = ""

    def __post_init__(self):
        n = self.problem.n
        object.__setattr__(self, "c0", _as_float_array(self.c0, n, "c0"))
        object.__setattr__(self, "x_hat", _as_float_array(self.x_hat, n, "x_hat"))


def validate_instance(inst: InverseInstance, tol: Tolerances = DEFAULT_TOL) -> ValidationReport:
    """Check that the target solution is forward-feasible within tolerance.

    Dimension mismatches raise ``ValueError`` (they are construction bugs,
    not infeasibility); anything else is reported as a list of violations.
    """
    violations = inst.problem.point_violations(inst.x_hat, tol)
    return ValidationReport(ok=not violations, violations=tuple(violations))


@dataclass(frozen=True)
class TrustRegion:
    """A 1-norm ball around the target point, possibly limited to a coordinate subset.

    ``size == math.inf`` encodes a removed region (the whole space), in which
    case ``active_dims`` is forced to the full index set.
    """

    center: np.ndarray
    size: float
    active_dims: tuple[int, ...]

    def __post_init__(self):
        center = np.asarray(self.center, dtype=float)
        center.setflags(write=False)
        object.__setattr__(self, "center", center)
        object.__setattr__(self, "size", float(self.size))
        if self.size <= 0:
            raise ValueError("trust region size must be positive")
        n = center.shape[0]
        if self.is_removed:
            dims = tuple(range(n))
        else:
            dims = tuple(sorted(int(j) for j in self.active_dims))
            if any(j < 0 or j >= n for j in dims):
                raise ValueError("active dimension outside [0, n)")
        object.__setattr__(self, "active_dims", dims)

    @property
    def is_removed(self) -> bool:
        return math.isinf(self.size)

    @property
    def is_full_dimensional(self) -> bool:
        return len(self.active_dims) == self.center.shape[0]

    @staticmethod
    def around(x_hat: np.ndarray, size: float) -> "TrustRegion":
        x_hat = np.asarray(x_hat, dtype=float)
        return TrustRegion(x_hat, size, tuple(range(x_hat.shape[0])))

    @staticmethod
    def removed(x_hat: np.ndarray) -> "TrustRegion":
        return TrustRegion.around(x_hat, INF)

    def contains(self, x: np.ndarray, tol: float = 1e-9) -> bool:
        if self.is_removed:
            return True
        dev = np.abs(np.asarray(x, dtype=float) - self.center)
        off = [j for j in range(self.center.shape[0]) if j not in set(self.active_dims)]
        if off and np.any(dev[off] > tol):
            return False
        return float(dev[list(self.active_dims)].sum()) <= self.size + tol


CUT_TRUST_REGION = "trust_region"
CUT_FULL_REGION = "full_region"
CUT_EARLY_STOP = "early_stop"
CUT_UNBOUNDED_ESCAPE = "unbounded_escape"


@dataclass(frozen=True)
class Cut:
    """A forward-feasible point inducing one master constraint."""

    point: np.ndarray
    violation_at_creation: float
    origin: str
    region_size: float

    def __post_init__(self):
        point = np.asarray(self.point, dtype=float)
        point.setflags(write=False)
        object.__setattr__(self, "point", point)


@dataclass(frozen=True)
class InfoSet:
    """State threaded between successive cut generation calls."""

    trust_region: TrustRegion
    outer_index: int = 0
    empty_count: int = 0
