"""Instance files: JSON documents with numbers stored as decimal strings.

Writing uses ``repr`` of the float (shortest round-tripping decimal), so
``read(write(x))`` reproduces every field exactly and repeated writes are
byte-identical.  The problem block is either inline or a relative path to an
MPS file, resolved against the instance file's directory.
"""

from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

from .mps import parse_mps_file
from .problem import ForwardProblem, InverseInstance, Row


def _encode(value: float) -> str:
    return repr(float(value))


def _decode(token: str) -> float:
    return float(token)


def _vector_out(values) -> list[str]:
    return [_encode(v) for v in values]


def _vector_in(tokens) -> list[float]:
    return [_decode(t) for t in tokens]


def problem_to_dict(problem: ForwardProblem) -> dict:
    doc = {
        "name": problem.name,
        "n": problem.n,
        "rows": [
            {
                "coeffs": [[j, _encode(v)] for j, v in row.coeffs],
                "relation": row.relation,
                "rhs": _encode(row.rhs),
            }
            for row in problem.rows
        ],
        "lower": _vector_out(problem.lower),
        "upper": _vector_out(problem.upper),
        "integer": [bool(f) for f in problem.is_integer],
    }
    if problem.objective is not None:
        doc["objective"] = _vector_out(problem.objective)
    return doc


def problem_from_dict(doc: dict, base_dir: Path | None = None) -> ForwardProblem:
    if "mps_path" in doc:
        base = base_dir if base_dir is not None else Path(".")
        return parse_mps_file(base / doc["mps_path"])
    rows = tuple(
        Row(
            tuple((int(j), _decode(v)) for j, v in row["coeffs"]),
            row["relation"],
            _decode(row["rhs"]),
        )
        for row in doc["rows"]
    )
    return ForwardProblem(
        name=doc["name"],
        n=int(doc["n"]),
        rows=rows,
        lower=_vector_in(doc["lower"]),
        upper=_vector_in(doc["upper"]),
        is_integer=np.array(doc["integer"], dtype=bool),
        objective=_vector_in(doc["objective"]) if "objective" in doc else None,
    )


def instance_to_dict(inst: InverseInstance) -> dict:
    return {
        "name": inst.label,
        "problem": problem_to_dict(inst.problem),
        "c0": _vector_out(inst.c0),
        "x_hat": _vector_out(inst.x_hat),
    }


def instance_from_dict(doc: dict, base_dir: Path | None = None) -> InverseInstance:
    return InverseInstance(
        problem=problem_from_dict(doc["problem"], base_dir),
        c0=_vector_in(doc["c0"]),
        x_hat=_vector_in(doc["x_hat"]),
        label=doc.get("name", ""),
    )


def write_instance(inst: InverseInstance, path) -> None:
    path = Path(path)
    text = json.dumps(instance_to_dict(inst), indent=2) + "\n"
    path.write_text(text, encoding="utf-8", newline="\n")


def read_instance(path) -> InverseInstance:
    path = Path(path)
    doc = json.loads(path.read_text(encoding="utf-8"))
    return instance_from_dict(doc, base_dir=path.parent)
