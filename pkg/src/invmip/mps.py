"""Free-format MPS reader for the supported subset.

Sections NAME, ROWS, COLUMNS (with INTORG/INTEND markers), RHS, RANGES,
BOUNDS and ENDATA are handled; anything else is an error with a line number.
Conventions: variables default to continuous ``[0, +inf)``; marker-delimited
columns become integer, also with ``[0, +inf)`` unless BOUNDS narrows them
(``BV`` means binary).  The first N row is the objective; further N rows are
read and ignored.  Objective sense lines, SOS and quadratic sections are out
of scope.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .problem import ForwardProblem, Row


class MpsParseError(ValueError):
    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


class UnknownSection(MpsParseError):
    pass


class DuplicateRow(MpsParseError):
    pass


class UnknownRowReference(MpsParseError):
    pass


class MalformedNumber(MpsParseError):
    pass


class UnexpectedEof(MpsParseError):
    pass


_SECTIONS = {"NAME", "ROWS", "COLUMNS", "RHS", "RANGES", "BOUNDS", "ENDATA"}
_ROW_KINDS = {"N", "G", "L", "E"}
_BOUND_KINDS = {"UP", "LO", "FX", "FR", "MI", "PL", "BV", "UI", "LI"}
_VALUELESS_BOUNDS = {"FR", "MI", "PL", "BV"}


@dataclass
class _RowDef:
    kind: str
    coeffs: dict = field(default_factory=dict)
    rhs: float = 0.0
    range_value: float | None = None


def _number(token: str, line: int) -> float:
    try:
        return float(token)
    except ValueError:
        raise MalformedNumber(f"cannot parse number {token!r}", line) from None


def parse_mps(text: str) -> ForwardProblem:
    name = ""
    section = None
    objective_row = None
    free_rows: set[str] = set()
    rows: dict[str, _RowDef] = {}
    row_order: list[str] = []
    columns: dict[str, int] = {}
    col_integer: list[bool] = []
    obj_coeffs: dict[int, float] = {}
    bounds: dict[int, list[float | None]] = {}
    integer_mode = False
    saw_end = False
    lineno = 0

    for lineno, raw in enumerate(text.splitlines(), start=1):
        if raw.startswith("*") or not raw.strip():
            continue
        tokens = raw.split()
        head = tokens[0].upper()
        is_header = not raw[0].isspace()

        if is_header:
            if head == "ENDATA":
                saw_end = True
                break
            if head == "NAME":
                name = tokens[1] if len(tokens) > 1 else ""
                section = "NAME"
                continue
            if head in _SECTIONS:
                section = head
                continue
            raise UnknownSection(f"unknown section {tokens[0]!r}", lineno)

        if section == "ROWS":
            if len(tokens) != 2 or tokens[0].upper() not in _ROW_KINDS:
                raise UnknownSection(f"malformed row declaration {raw.strip()!r}", lineno)
            kind, row_name = tokens[0].upper(), tokens[1]
            if row_name in rows or row_name in free_rows or row_name == objective_row:
                raise DuplicateRow(f"row {row_name!r} declared twice", lineno)
            if kind == "N":
                if objective_row is None:
                    objective_row = row_name
                else:
                    free_rows.add(row_name)
            else:
                rows[row_name] = _RowDef(kind=kind)
                row_order.append(row_name)
        elif section == "COLUMNS":
            if len(tokens) >= 3 and tokens[1] == "'MARKER'":
                marker = tokens[2].strip("'").upper()
                if marker == "INTORG":
                    integer_mode = True
                elif marker == "INTEND":
                    integer_mode = False
                else:
                    raise UnknownSection(f"unknown marker {tokens[2]!r}", lineno)
                continue
            if len(tokens) < 3 or len(tokens) % 2 == 0:
                raise MalformedNumber(f"malformed column line {raw.strip()!r}", lineno)
            col_name = tokens[0]
            if col_name not in columns:
                columns[col_name] = len(col_integer)
                col_integer.append(integer_mode)
            j = columns[col_name]
            for row_name, value in zip(tokens[1::2], tokens[2::2]):
                coefficient = _number(value, lineno)
                if row_name == objective_row:
                    obj_coeffs[j] = obj_coeffs.get(j, 0.0) + coefficient
                elif row_name in rows:
                    entry = rows[row_name]
                    entry.coeffs[j] = entry.coeffs.get(j, 0.0) + coefficient
                elif row_name in free_rows:
                    continue
                else:
                    raise UnknownRowReference(f"unknown row {row_name!r}", lineno)
        elif section in ("RHS", "RANGES"):
            pairs = tokens[1:] if len(tokens) % 2 == 1 else tokens
            if len(pairs) % 2 != 0 or not pairs:
                raise MalformedNumber(f"malformed {section} line {raw.strip()!r}", lineno)
            for row_name, value in zip(pairs[0::2], pairs[1::2]):
                amount = _number(value, lineno)
                if row_name == objective_row or row_name in free_rows:
                    continue
                if row_name not in rows:
                    raise UnknownRowReference(f"unknown row {row_name!r}", lineno)
                if section == "RHS":
                    rows[row_name].rhs = amount
                else:
                    rows[row_name].range_value = amount
        elif section == "BOUNDS":
            kind = tokens[0].upper()
            if kind not in _BOUND_KINDS:
                raise UnknownSection(f"unknown bound type {tokens[0]!r}", lineno)
            needs_value = kind not in _VALUELESS_BOUNDS
            expected = 4 if needs_value else 3
            body = tokens
            if len(tokens) == expected:
                body = tokens[:1] + tokens[2:]  # drop the bound set name
            elif len(tokens) != expected - 1:
                raise MalformedNumber(f"malformed bound line {raw.strip()!r}", lineno)
            col_name = body[1]
            if col_name not in columns:
                raise UnknownRowReference(f"unknown column {col_name!r}", lineno)
            j = columns[col_name]
            entry = bounds.setdefault(j, [None, None])
            value = _number(body[2], lineno) if needs_value else None
            if kind == "UP":
                entry[1] = value
            elif kind == "LO":
                entry[0] = value
            elif kind == "FX":
                entry[0] = entry[1] = value
            elif kind == "FR":
                entry[0], entry[1] = -math.inf, math.inf
            elif kind == "MI":
                entry[0] = -math.inf
            elif kind == "PL":
                entry[1] = math.inf
            elif kind == "BV":
                entry[0], entry[1] = 0.0, 1.0
                col_integer[j] = True
            elif kind == "UI":
                entry[1] = value
                col_integer[j] = True
            elif kind == "LI":
                entry[0] = value
                col_integer[j] = True
        elif section == "NAME":
            raise UnknownSection(f"unexpected data line {raw.strip()!r}", lineno)
        else:
            raise UnknownSection("data before any section header", lineno)

    if not saw_end:
        raise UnexpectedEof("missing ENDATA", lineno + 1)

    n = len(col_integer)
    lower = np.zeros(n)
    upper = np.full(n, math.inf)
    for j, (lo, hi) in bounds.items():
        if lo is not None:
            lower[j] = lo
        if hi is not None:
            upper[j] = hi

    built_rows: list[Row] = []
    for row_name in row_order:
        entry = rows[row_name]
        coeffs = tuple(sorted(entry.coeffs.items()))
        r = entry.range_value
        if r is None:
            relation = {"G": ">=", "L": "<=", "E": "="}[entry.kind]
            built_rows.append(Row(coeffs, relation, entry.rhs))
            continue
        # MPS range semantics: the row becomes two-sided
        if entry.kind == "G":
            low, high = entry.rhs, entry.rhs + abs(r)
        elif entry.kind == "L":
            low, high = entry.rhs - abs(r), entry.rhs
        else:
            low = entry.rhs + min(r, 0.0)
            high = entry.rhs + max(r, 0.0)
        built_rows.append(Row(coeffs, ">=", low))
        built_rows.append(Row(coeffs, "<=", high))

    objective = np.zeros(n)
    for j, value in obj_coeffs.items():
        objective[j] = value
    return ForwardProblem(
        name=name,
        n=n,
        rows=tuple(built_rows),
        lower=lower,
        upper=upper,
        is_integer=np.array(col_integer, dtype=bool),
        objective=objective,
    )


def parse_mps_file(path) -> ForwardProblem:
    with open(path, "r", encoding="utf-8") as handle:
        return parse_mps(handle.read())
