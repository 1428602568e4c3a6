import json
from fractions import Fraction as F

import pytest
from hypothesis import given, strategies as st

from copduality.exact import rank
from copduality.model import (CopSystem, ProblemFormatError, eval_constraint, eval_lifted,
                              identity_a_decomposition_check, lifted_a, lifted_b, load_problem,
                              parse_rational, quad, bilinear, system_from_dict, system_to_dict)
from tests.strategies import rationals, simplex_points, symmetric


def test_eval_at_zero_is_A0(ex1):
    assert eval_constraint(ex1, (0, 0)) == ex1.matrices[0]


def test_eval_example_point(ex1):
    D = eval_constraint(ex1, (-1, -1))
    assert [D[i][i] for i in range(3)] == [2, 1, 0]
    assert D[1][2] == D[2][1] == 1
    assert D[0][1] == D[0][2] == 0


def test_eval_sum(ex3):
    D = eval_constraint(ex3, (1,))
    A0, A1 = ex3.matrices
    assert D == tuple(tuple(a + b for a, b in zip(r0, r1)) for r0, r1 in zip(A0, A1))


def test_eval_lifted_basics(ex2):
    assert eval_lifted(ex2, (1, 0)) == ex2.matrices[0]
    assert not any(any(r) for r in eval_lifted(ex2, (0, 0)))
    assert eval_lifted(ex2, (1, 1)) == eval_constraint(ex2, (1,))


def test_lifted_a_examples(ex1, ex3):
    assert lifted_a(ex1, (0, 0, 1)) == (0, 0, 0)
    assert lifted_a(ex3, (F(1, 4), F(1, 2), F(1, 4))) == (0, F(1, 2))
    assert lifted_a(ex1, (0, 0, 0)) == (0, 0, 0)


def test_lifted_b_examples(ex1, ex2, ex3):
    # the matrices give e_2'A_2 e_3 = -1, so b(2,1) = (0, 0, -1)
    assert lifted_b(ex1, 2, (0, 0, 1)) == (0, 0, -1)
    assert lifted_b(ex2, 1, (F(1, 2), 0, F(1, 2))) == (0, F(3, 2))
    assert lifted_b(ex3, 1, (F(1, 2), 0, F(1, 2))) == (0, 0)


@pytest.mark.parametrize("name,t", [("ex1", (F(1, 3),) * 3), ("ex2", (F(1, 2), 0, F(1, 2)))])
def test_identity_decomposition(name, t):
    assert identity_a_decomposition_check(load_problem(name), t)


systems = st.integers(2, 4).flatmap(lambda p: st.tuples(
    st.just(p), st.lists(symmetric(p), min_size=2, max_size=3)))


@given(systems, st.data())
def test_lifted_identities(sp, data):
    p, mats = sp
    sys_ = CopSystem(tuple(mats))
    t = data.draw(simplex_points(p))
    z = data.draw(st.lists(rationals(), min_size=len(mats), max_size=len(mats)))
    lam = data.draw(rationals(0, 3))
    assert identity_a_decomposition_check(sys_, t)
    # quadratic homogeneity
    assert lifted_a(sys_, [lam * v for v in t]) == tuple(lam * lam * v for v in lifted_a(sys_, t))
    # polarisation: z.a(t) = t'B(z)t and z.b(k,t) = e_k'B(z)t
    B = eval_lifted(sys_, z)
    assert sum(a * b for a, b in zip(z, lifted_a(sys_, t))) == quad(B, t)
    for k in range(1, p + 1):
        e = [F(int(i == k - 1)) for i in range(p)]
        assert sum(a * b for a, b in zip(z, lifted_b(sys_, k, t))) == bilinear(B, e, t)
    # a(t) = sum_k t_k b(k,t)
    acc = [F(0)] * len(mats)
    for k in range(1, p + 1):
        for m, v in enumerate(lifted_b(sys_, k, t)):
            acc[m] += t[k - 1] * v
    assert tuple(acc) == lifted_a(sys_, t)


@pytest.mark.parametrize("name", ["ex1", "ex2", "ex3"])
def test_span_of_a_matches_entry_vectors(name):
    sys_ = load_problem(name)
    p = sys_.p
    g = [tuple(M[k][l] for M in sys_.matrices) for k in range(p) for l in range(k, p)]
    import random
    rng = random.Random(7)
    pts = []
    for _ in range(p * (p + 1) // 2 + 1):
        raw = [rng.randint(1, 9) for _ in range(p)]
        pts.append(tuple(F(v, sum(raw)) for v in raw))
    A = [lifted_a(sys_, t) for t in pts]
    assert rank(A) == rank(g) == rank(A + g)


def test_parse_rational():
    assert parse_rational("3/6") == F(1, 2)
    assert parse_rational(-2) == -2
    assert parse_rational("-a", {"a": F(3)}) == -3
    assert parse_rational("3/2*a", {"a": F(2)}) == 3
    for bad in (0.5, True, "x", "1/0"):
        with pytest.raises((ValueError, ProblemFormatError)):
            parse_rational(bad)


def test_parameter_override():
    sys_ = load_problem("ex1", {"a": F(2)})
    assert sys_.matrices[0][0][0] == 2


def test_round_trip():
    sys_ = load_problem("ex2")
    again = system_from_dict(json.loads(json.dumps(system_to_dict(sys_))))
    assert again.matrices == sys_.matrices


def test_rejects_asymmetric():
    with pytest.raises(ProblemFormatError, match=r"\[1,2\]"):
        CopSystem((((1, 2), (3, 1)), ((0, 0), (0, 0))))


def test_rejects_bad_shapes():
    with pytest.raises(ProblemFormatError):
        system_from_dict({"n": 0, "p": 2, "matrices": [[[1, 0], [0, 1]]]})
    with pytest.raises(ProblemFormatError):
        system_from_dict({"n": 1, "p": 2, "matrices": [[[1, 0], [0, 1]], [[1, 0, 0], [0, 1, 0], [0, 0, 1]]]})
    with pytest.raises(ProblemFormatError):
        system_from_dict({"n": 2, "p": 2, "matrices": [[[1, 0], [0, 1]], [[1, 0], [0, 1]]]})
