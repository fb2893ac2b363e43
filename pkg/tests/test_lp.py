from fractions import Fraction as F

import numpy as np
from hypothesis import given, strategies as st
from scipy.optimize import linprog

from boxcommit.lp import solve_lp


def test_small_optimum():
    # min -x - y  s.t. x + y + s = 4, x + 3y + t = 6
    res = solve_lp([-1, -1, 0, 0], [[1, 1, 1, 0], [1, 3, 0, 1]], [4, 6])
    assert res.status == "optimal" and res.value == -4


def test_infeasible_and_unbounded():
    assert solve_lp([0, 0], [[1, 1]], [-1]).status == "infeasible"
    assert solve_lp([-1, 0], [[1, -1]], [0]).status == "unbounded"


def test_redundant_rows():
    res = solve_lp([1, 2], [[1, 1], [2, 2]], [1, 2])
    assert res.status == "optimal" and res.value == 1 and res.x == (F(1), F(0))


def test_maximize_flag():
    res = solve_lp([1, 1], [[1, 2]], [4], maximize=True)
    assert res.value == 4


@given(st.integers(0, 2**32 - 1))
def test_agrees_with_floating_point_solver(seed):
    rng = np.random.default_rng(seed)
    m, n = int(rng.integers(1, 4)), int(rng.integers(2, 6))
    A = rng.integers(-3, 4, size=(m, n))
    x0 = rng.integers(0, 3, size=n)
    b = A @ x0  # feasible by construction
    c = rng.integers(-2, 4, size=n)
    ours = solve_lp(c.tolist(), A.tolist(), b.tolist())
    ref = linprog(c, A_eq=A, b_eq=b, bounds=[(0, None)] * n, method="highs")
    if ref.status == 3:
        assert ours.status == "unbounded"
    else:
        assert ours.status == "optimal"
        assert abs(float(ours.value) - ref.fun) < 1e-7
        x = np.array([float(v) for v in ours.x])
        assert np.allclose(A @ x, b) and (x >= 0).all()
