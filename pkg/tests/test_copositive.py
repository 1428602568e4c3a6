import random
from fractions import Fraction as F

import pytest
from hypothesis import given, strategies as st

from copduality import kernels
from copduality._kernels_py import grid_min_int as py_grid_min_int, quad_batch_int as py_quad_batch
from copduality.copositive import (MAX_ORDER, integer_scaled, is_copositive, min_quadratic_over_polytope,
                                   min_quadratic_over_simplex, zero_piece_vertices, zero_set)
from copduality.model import eval_constraint, quad
from tests.strategies import symmetric

I3 = [[int(i == j) for j in range(3)] for i in range(3)]
HYP = [[0, -1], [-1, 0]]


def test_identity_minimum():
    rep = min_quadratic_over_simplex(I3)
    assert rep.minimum == F(1, 3)
    assert rep.minimizers == ((F(1, 3),) * 3,)


def test_perfect_square_minimum(ex2):
    rep = min_quadratic_over_simplex(ex2.matrices[0])
    assert rep.minimum == 0
    assert all(t[0] == t[2] for t in rep.minimizers)


def test_two_by_two():
    rep = min_quadratic_over_simplex(HYP)
    assert rep.minimum == -F(1, 2) and rep.minimizers == ((F(1, 2), F(1, 2)),)
    res = is_copositive(HYP)
    assert not res.copositive and res.witness == (F(1, 2), F(1, 2))


def test_identity_copositive():
    assert is_copositive(I3).copositive
    assert zero_set(I3) == []


def test_example_point_copositive(ex1):
    D = eval_constraint(ex1, (-1, -1))
    assert is_copositive(D).copositive
    zs = zero_set(D)
    assert [c.point for c in zs] == [(0, 0, 1)]


def test_zero_set_segment(ex2):
    D = ex2.matrices[0]
    zs = zero_set(D)
    assert all(c.point[0] == c.point[2] for c in zs)
    full = [c for c in zs if c.support == (0, 1, 2)][0]
    assert zero_piece_vertices(D, full.support) == [(F(1, 2), 0, F(1, 2)), (0, 1, 0)]


def test_zero_set_requires_copositive():
    with pytest.raises(ValueError):
        zero_set(HYP)


def test_polytope_single_vertex():
    v = (F(1, 4), F(1, 2), F(1, 4))
    D = [[1, 2, 0], [2, -3, 1], [0, 1, 5]]
    assert min_quadratic_over_polytope(D, [v]).minimum == quad([[F(x) for x in r] for r in D], v)


def test_polytope_segment_in_zero_set(ex2):
    rep = min_quadratic_over_polytope(ex2.matrices[0], [(F(1, 2), 0, F(1, 2)), (0, 1, 0)])
    assert rep.minimum == 0
    assert all(c.value == 0 for c in rep.critical if c.support == (0, 1))


def test_polytope_edge_midpoint():
    rep = min_quadratic_over_polytope(I3, [(1, 0, 0), (0, 1, 0)])
    assert rep.minimum == F(1, 2) and rep.minimizers == ((F(1, 2), F(1, 2), 0),)


def test_order_limit():
    big = [[int(i == j) for j in range(MAX_ORDER + 1)] for i in range(MAX_ORDER + 1)]
    with pytest.raises(ValueError):
        is_copositive(big)


@given(st.integers(2, 4).flatmap(symmetric))
def test_witness_is_negative(D):
    res = is_copositive(D)
    if not res.copositive:
        assert quad(D, res.witness) < 0
        assert all(v >= 0 for v in res.witness) and sum(res.witness) == 1


@given(st.integers(2, 4).flatmap(lambda p: st.tuples(symmetric(p), symmetric(p))))
def test_sum_of_copositive_is_copositive(pair):
    D, E = pair
    if is_copositive(D).copositive and is_copositive(E).copositive:
        assert is_copositive([[a + b for a, b in zip(r, s)] for r, s in zip(D, E)]).copositive


@given(st.integers(2, 4).flatmap(symmetric))
def test_critical_sets_constant(D):
    for c in min_quadratic_over_simplex(D).critical:
        assert quad(D, c.point) == c.value
        assert quad(D, c.particular) == c.value


def _grid_verdict(D, denom=64):
    Di, scale = integer_scaled(D)
    val, _ = kernels.grid_min_int(Di, denom)
    gmin = F(val, denom * denom * scale)
    err = 2 * max(abs(v) for r in D for v in r) * len(D) / F(denom)
    if gmin < 0:
        return False
    if gmin > err:
        return True
    return None


@given(st.integers(2, 4).flatmap(symmetric))
def test_agrees_with_grid_oracle(D):
    g = _grid_verdict(D)
    if g is not None:
        assert is_copositive(D).copositive == g


# -- kernels ---------------------------------------------------------------

def test_backend_reported():
    assert kernels.KERNEL_BACKEND in ("cython", "python")


@pytest.mark.parametrize("seed", range(20))
def test_backends_agree(seed):
    rng = random.Random(seed)
    p = rng.randint(2, 5)
    D = [[0] * p for _ in range(p)]
    for i in range(p):
        for j in range(i, p):
            D[i][j] = D[j][i] = rng.randint(-50, 50)
    denom = rng.choice([4, 8, 16])
    assert kernels.grid_min_int(D, denom) == py_grid_min_int(D, denom)
    pts = [list(u) for u in kernels.compositions(p, denom)][:50]
    assert kernels.quad_batch_int(pts, [D]) == py_quad_batch(pts, [D])
    fv, fu = kernels.grid_min_float(D, denom)
    assert abs(fv - kernels.grid_min_int(D, denom)[0] / denom ** 2) < 1e-9


def test_kernel_overflow_falls_back():
    D = [[10 ** 15, 0], [0, 10 ** 15]]
    assert kernels.grid_min_int(D, 64) == py_grid_min_int(D, 64)
