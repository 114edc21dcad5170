import math
import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from invmip.problem import ForwardProblem, InverseInstance, Row


def make_problem(name, n, rows, lower, upper, integer=True, objective=None):
    mask = np.full(n, integer) if isinstance(integer, bool) else np.asarray(integer)
    return ForwardProblem(
        name=name,
        n=n,
        rows=tuple(Row(tuple(coeffs), rel, rhs) for coeffs, rel, rhs in rows),
        lower=lower,
        upper=upper,
        is_integer=mask,
        objective=objective,
    )


@pytest.fixture
def ec_problem():
    """Two binaries with b1 + 0.6 b2 <= 1; feasible points (0,0), (1,0), (0,1)."""
    return make_problem(
        "ec-binary", 2, [(((0, 1.0), (1, 0.6)), "<=", 1.0)],
        [0.0, 0.0], [1.0, 1.0], objective=[-1.0, -1.0],
    )


@pytest.fixture
def ec_instance(ec_problem):
    return InverseInstance(ec_problem, c0=[-1.0, -1.0], x_hat=[0.0, 1.0], label="ec")


@pytest.fixture
def knapsack_problem():
    """Integer grid 0..3 squared above the line x1 + x2 >= 2."""
    return make_problem(
        "knapsack", 2, [(((0, 1.0), (1, 1.0)), ">=", 2.0)],
        [0.0, 0.0], [3.0, 3.0],
    )


@pytest.fixture
def knapsack_instance(knapsack_problem):
    # inverse-feasible cone is {c1 = c2 >= 0}; distance from (1, 2) is 1
    return InverseInstance(knapsack_problem, c0=[1.0, 2.0], x_hat=[1.0, 1.0], label="knap")


@pytest.fixture
def octagon_problem():
    """2D integer region whose hull has extreme points
    (2,6), (2,8), (3,9), (5,9), (6,8), (6,6), (5,5), (3,5)."""
    rows = [
        (((0, 1.0),), ">=", 2.0),
        (((0, -1.0), (1, 1.0)), "<=", 6.0),
        (((1, 1.0),), "<=", 9.0),
        (((0, 1.0), (1, 1.0)), "<=", 14.0),
        (((0, 1.0),), "<=", 6.0),
        (((0, 1.0), (1, -1.0)), "<=", 0.0),
        (((1, 1.0),), ">=", 5.0),
        (((0, 1.0), (1, 1.0)), ">=", 8.0),
    ]
    return make_problem("octagon", 2, rows, [0.0, 0.0], [9.0, 9.0])


@pytest.fixture
def octagon_instance(octagon_problem):
    # target on the hull corner; the inverse cone is {c1 >= 0, c1 + c2 <= 0},
    # so the nearest cost to (-2, 1) is (0, 0) at distance 3
    return InverseInstance(octagon_problem, c0=[-2.0, 1.0], x_hat=[3.0, 9.0], label="octagon")


@pytest.fixture
def unbounded_problem():
    return make_problem(
        "open-corner", 2, [(((0, 1.0), (1, 1.0)), ">=", 2.0)],
        [0.0, 0.0], [math.inf, math.inf],
    )


@pytest.fixture
def unbounded_instance(unbounded_problem):
    # minimizing (-1, 0) is unbounded, so cut generation must escape;
    # the inverse cone is {0 <= c1 <= c2} and the optimum is c = 0 at distance 1
    return InverseInstance(unbounded_problem, c0=[-1.0, 0.0], x_hat=[2.0, 0.0], label="open")
