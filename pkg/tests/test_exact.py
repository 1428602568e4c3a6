from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.optimize import linprog

from copduality.exact import (EQ, GE, LE, LPInstance, matvec, nullspace, rank, solve_linear,
                              solve_lp, verify_outcome)
from copduality.exact.linalg import orthogonal_basis, project_onto_complement, dot, transpose
from tests.strategies import matrices, rationals


# -- rank / linear systems ----------------------------------------------

def test_rank_zero_matrix():
    assert rank([[0] * 3 for _ in range(3)]) == 0


def test_rank_identity():
    assert rank([[int(i == j) for j in range(4)] for i in range(4)]) == 4


def test_rank_example_columns():
    # a(t*) and b(2,1) of the two-variable example
    assert rank([[0, 0, 0], [0, -1, 0]]) == 1


def test_solve_identity():
    sol = solve_linear([[1, 0], [0, 1]], [F(3), F(-2)])
    assert sol.particular == (3, -2) and sol.nullspace == ()


def test_solve_zero_system():
    sol = solve_linear([[0, 0]], [F(0)])
    assert sol.particular == (0, 0) and len(sol.nullspace) == 2


def test_solve_one_equation():
    sol = solve_linear([[1, 1]], [F(1)])
    assert sol.particular == (1, 0)
    assert len(sol.nullspace) == 1
    v = sol.nullspace[0]
    assert v[0] == -v[1] != 0


def test_solve_inconsistent():
    assert solve_linear([[1, 1], [1, 1]], [F(0), F(1)]) is None


@given(matrices(3, 4))
def test_rank_transpose(M):
    assert rank(M) == rank(transpose(M))


@given(matrices(3, 4), st.lists(rationals(), min_size=4, max_size=4), st.lists(rationals(), min_size=4, max_size=4))
def test_solve_reconstruction(A, x0, coeffs):
    b = matvec(A, x0)
    sol = solve_linear(A, b)
    assert sol is not None
    assert matvec(A, sol.point(coeffs)) == b
    assert sol.dimension == 4 - rank(A)
    for v in nullspace(A):
        assert not any(matvec(A, v))


@given(matrices(3, 4))
def test_gram_schmidt_orthogonal(M):
    B = orthogonal_basis(M)
    assert len(B) == rank(M)
    for i in range(len(B)):
        for j in range(i):
            assert dot(B[i], B[j]) == 0
    for v in M:
        assert not any(project_onto_complement(v, B))


# -- simplex --------------------------------------------------------------

def test_lp_bounded():
    out = solve_lp(LPInstance(objective=(1,), rows=((1,),), senses=(LE,), rhs=(1,), maximize=True))
    assert out.status == "optimal" and out.value == 1


def test_lp_unbounded_ray():
    lp = LPInstance(objective=(1,), maximize=True)
    out = solve_lp(lp)
    assert out.status == "unbounded" and out.ray == (1,)
    assert verify_outcome(lp, out)


def test_lp_infeasible_farkas():
    lp = LPInstance(objective=(0, 0), rows=((1, 1), (1, 1)), senses=(LE, GE), rhs=(1, 2))
    out = solve_lp(lp)
    assert out.status == "infeasible"
    assert verify_outcome(lp, out)


def test_lp_example_row_unbounded(ex1):
    # max e_2'A(x)tau over {x : A(x)tau >= 0}, tau = e_3: A(x)tau = (0, -x2, 0)
    from copduality.model import lifted_b
    tau = (0, 0, 1)
    rows = [lifted_b(ex1, k, tau) for k in (1, 2, 3)]
    assert rows[1] == (0, 0, -1)
    b = rows[1]
    lp = LPInstance(objective=b[1:], rows=tuple(r[1:] for r in rows), senses=(GE,) * 3,
                    rhs=tuple(-r[0] for r in rows), lower=(None, None), maximize=True, constant=b[0])
    out = solve_lp(lp)
    assert out.status == "unbounded"
    assert verify_outcome(lp, out)


def test_lp_free_variables_and_bounds():
    lp = LPInstance(objective=(1, 1), rows=((1, -1),), senses=(EQ,), rhs=(F(1, 2),),
                    lower=(None, F(-3)), upper=(F(5), None))
    out = solve_lp(lp)
    assert out.status == "optimal" and out.value == -F(11, 2)
    assert verify_outcome(lp, out)


def _scipy_status(lp):
    c = np.array([float(v) for v in lp.objective]) * (-1 if lp.maximize else 1)
    A_ub, b_ub, A_eq, b_eq = [], [], [], []
    for r, s, b in zip(lp.rows, lp.senses, lp.rhs):
        row = [float(v) for v in r]
        if s == LE:
            A_ub.append(row); b_ub.append(float(b))
        elif s == GE:
            A_ub.append([-v for v in row]); b_ub.append(-float(b))
        else:
            A_eq.append(row); b_eq.append(float(b))
    res = linprog(c, A_ub=A_ub or None, b_ub=b_ub or None, A_eq=A_eq or None, b_eq=b_eq or None,
                  bounds=[(0, None)] * lp.nvars, method="highs")
    return res


lp_strategy = st.integers(1, 3).flatmap(lambda m: st.integers(1, 4).flatmap(lambda n: st.tuples(
    st.lists(rationals(-3, 3, 2), min_size=n, max_size=n),
    matrices(m, n, -3, 3, 2),
    st.lists(st.sampled_from([LE, GE, EQ]), min_size=m, max_size=m),
    st.lists(rationals(-3, 3, 2), min_size=m, max_size=m),
    st.booleans())))


@given(lp_strategy)
def test_lp_certificates_and_scipy_oracle(data):
    c, A, senses, b, maximize = data
    lp = LPInstance(objective=tuple(c), rows=tuple(map(tuple, A)), senses=tuple(senses), rhs=tuple(b),
                    maximize=maximize)
    out = solve_lp(lp)
    assert verify_outcome(lp, out)
    ref = _scipy_status(lp)
    expected = {0: "optimal", 2: "infeasible", 3: "unbounded"}[ref.status]
    assert out.status == expected
    if expected == "optimal":
        val = -ref.fun if maximize else ref.fun
        assert abs(float(out.value) - val) < 1e-7


@given(lp_strategy)
def test_lp_complementary_slackness(data):
    c, A, senses, b, maximize = data
    lp = LPInstance(objective=tuple(c), rows=tuple(map(tuple, A)), senses=tuple(senses), rhs=tuple(b),
                    maximize=maximize)
    out = solve_lp(lp)
    if out.status == "optimal":
        act = matvec(lp.rows, out.x)
        assert all(y * (a - r) == 0 for y, a, r in zip(out.duals, act, lp.rhs))
        assert all(rc * x == 0 for rc, x in zip(out.reduced_costs, out.x))
    if out.status == "infeasible":
        y = out.farkas
        yA = [sum((yi * row[j] for yi, row in zip(y, lp.rows)), F(0)) for j in range(lp.nvars)]
        yb = sum((yi * r for yi, r in zip(y, lp.rhs)), F(0))
        # separator: y'A >= 0 on x >= 0 while y'b < 0, or the mirrored form
        assert (all(v >= 0 for v in yA) and yb < 0) or (all(v <= 0 for v in yA) and yb > 0)


def test_lp_bland_deterministic():
    lp = LPInstance(objective=(-1, -1, 0), rows=((1, 1, 1), (1, -1, 0)), senses=(LE, EQ), rhs=(2, 0))
    a, b = solve_lp(lp), solve_lp(lp)
    assert a == b
