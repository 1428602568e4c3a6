from fractions import Fraction as F

import pytest
from hypothesis import given, strategies as st

from copduality.duality import (MEMBER, NOT_MEMBER, NO_UNIFORM, UNIFORM, ConeCertificate, analyze,
                                check_A1, check_B1, cone_membership, decompose_dyad, duffin_fw,
                                dyad_reconstruction, outer)
from copduality.model import CopSystem, frobenius, lifted_a, lifted_b, load_problem
from copduality.sip import CutPool

HALF = F(1, 2)
T1 = (HALF, 0, HALF)
T2 = (0, 1, 0)
SEG = ((T1, T2),)


@pytest.fixture(scope="module")
def verdicts():
    return {name: analyze(load_problem(name)) for name in ("ex1", "ex2", "ex3")}


# -- cone membership -------------------------------------------------------

def test_member_with_quarter_half_quarter(ex3):
    cert = cone_membership(ex3, (0, 1), "pieces", SEG, sample=[(F(1, 4), HALF, F(1, 4))])
    assert cert.verdict == MEMBER and cert.verify(ex3)
    assert cert.combination == (((F(1, 4), HALF, F(1, 4)), F(2)),)


def test_not_member_with_separator(ex2):
    b = lifted_b(ex2, 1, T1)
    assert b == (0, F(3, 2))
    cert = cone_membership(ex2, b, "pieces", SEG)
    assert cert.verdict == NOT_MEMBER and cert.verify(ex2)
    z = cert.separator
    assert sum(a * c for a, c in zip(z, b)) < 0
    assert all(m >= 0 for m in cert.domain_minima)
    # the hand separator z = (0, -1) works as well
    hand = ConeCertificate(NOT_MEMBER, b, "pieces", SEG, separator=(0, -1))
    assert hand.verify(ex2)


def test_zero_target_is_member(ex1, ex2):
    for sys_ in (ex1, ex2):
        cert = cone_membership(sys_, (0,) * (sys_.n + 1), "simplex")
        assert cert.verdict == MEMBER and cert.combination == ()


def test_bad_certificates_rejected(ex2):
    assert not ConeCertificate(NOT_MEMBER, (0, F(3, 2)), "pieces", SEG, separator=(0, 1)).verify(ex2)
    assert not ConeCertificate(MEMBER, (0, 1), "pieces", SEG, combination=(((F(1, 3),) * 3, F(1)),)).verify(ex2)


def test_simplex_domain_member(ex3):
    # a(e1) = (1, 1) is trivially a member over the whole simplex
    cert = cone_membership(ex3, (2, 2), "simplex")
    assert cert.verdict == MEMBER and cert.verify(ex3)


def test_reduction_requires_zero(ex1):
    with pytest.raises(ValueError):
        cone_membership(ex1, (0, 0, -1), reduction=(-1, -1))


# -- condition I -------------------------------------------------------------

def test_B1(verdicts):
    assert (verdicts["ex2"].condition_I.b1.rank_A, verdicts["ex2"].condition_I.b1.rank_AB) == (0, 1)
    assert not verdicts["ex2"].condition_I.b1.holds
    for name in ("ex1", "ex3"):
        b1 = verdicts[name].condition_I.b1
        assert (b1.rank_A, b1.rank_AB) == (0, 0) and b1.holds


@pytest.mark.parametrize("name", ["ex1", "ex2", "ex3"])
def test_A1_holds_with_annihilating_U(verdicts, name):
    sys_ = load_problem(name)
    a1 = verdicts[name].condition_I.a1
    assert a1.holds is True
    assert all(v == 0 for v in a1.residuals)
    assert all(frobenius(A, a1.U_star) == 0 for A in sys_.matrices)
    # complementary to the maximum-slack matrix A(x*)
    assert a1.complementarity == 0


def test_A1_target_example1(verdicts):
    assert verdicts["ex1"].condition_I.a1.target == (0, 0, 0)


def test_condition_I(verdicts):
    assert verdicts["ex1"].condition_I.holds is True
    assert verdicts["ex2"].condition_I.holds is False
    assert verdicts["ex3"].condition_I.holds is True
    assert all(verdicts[n].condition_I.agrees in (True, None) for n in verdicts)


# -- condition II and the direct criterion ------------------------------------

def test_condition_II(verdicts):
    v = verdicts["ex1"]
    assert v.condition_II_holds is False
    [case] = v.condition_II
    assert (case.k, case.j) == (2, 0) and case.certificate.verdict == NOT_MEMBER
    assert verdicts["ex2"].condition_II == [] and verdicts["ex2"].condition_II_holds is True
    v = verdicts["ex3"]
    assert v.condition_II_holds is True and len(v.condition_II) == 3
    for case in v.condition_II:
        assert case.certificate.verdict == MEMBER and case.certificate.verify(load_problem("ex3"))


def test_cond2(verdicts):
    c = verdicts["ex1"].cond2
    assert c[(2, 0)].verdict == NOT_MEMBER and c[(2, 0)].verify(load_problem("ex1"))
    assert c[(1, 0)].verdict == MEMBER and c[(1, 0)].combination == ()
    j = verdicts["ex3"].immobile.vertices.index(T1)
    assert verdicts["ex3"].cond2[(2, j)].verdict == MEMBER
    for name in verdicts:
        assert verdicts[name].cond2_agrees is True


def test_verdicts(verdicts):
    assert verdicts["ex1"].overall == NO_UNIFORM
    assert verdicts["ex2"].overall == NO_UNIFORM
    assert verdicts["ex3"].overall == UNIFORM


def test_slater_system_is_uniform():
    sys_ = CopSystem(([[1, 0], [0, 1]], [[1, 0], [0, -1]]))
    v = analyze(sys_)
    assert v.overall == UNIFORM
    fw = duffin_fw(sys_, v.immobile, None, v.immobile.x_bar)
    assert fw.F == () and fw.L_basis == ()
    assert fw.W == tuple(vec for _, vec in fw.W_tilde)
    assert fw.W_tilde[-1][1] == (1, 0)
    assert fw.passes


# -- F / W sets --------------------------------------------------------------

def test_duffin_example3(verdicts, ex3):
    v = verdicts["ex3"]
    fw = duffin_fw(ex3, v.immobile, v.index_sets, v.min_active.x, v.cond2)
    assert {vec for _, vec in fw.F} == {(0, 0)}
    assert fw.L_basis == ()
    assert fw.W == tuple(vec for _, vec in fw.W_tilde)
    assert fw.f_on_hyperplane and fw.w_positive and fw.orthogonal and fw.cone_inclusion
    assert fw.passes


def test_duffin_example1_fails_inclusion(verdicts, ex1):
    v = verdicts["ex1"]
    fw = duffin_fw(ex1, v.immobile, v.index_sets, v.min_active.x, v.cond2)
    assert fw.f_on_hyperplane and fw.w_positive and fw.orthogonal
    assert fw.cone_inclusion is False and not fw.passes


# -- dyads -------------------------------------------------------------------

def test_dyad_midpoint():
    beta = decompose_dyad(((T1[0] + T2[0]) / 2, (T1[1] + T2[1]) / 2, (T1[2] + T2[2]) / 2), [T1, T2])
    assert beta == {(0, 0): 0, (0, 1): F(1, 4), (1, 1): 0}


def test_dyad_vertex():
    beta = decompose_dyad(T1, [T1, T2])
    assert beta == {(0, 0): F(1, 4), (0, 1): 0, (1, 1): 0}


def test_dyad_three_quarter():
    t = tuple(F(3, 4) * a + F(1, 4) * b for a, b in zip(T1, T2))
    beta = decompose_dyad(t, [T1, T2])
    assert beta[(0, 1)] == F(3, 16)
    assert dyad_reconstruction(beta, [T1, T2]) == outer(t)


@given(st.fractions(0, 1).filter(lambda q: q.denominator <= 50))
def test_dyad_reconstruction_property(w):
    t = tuple(w * a + (1 - w) * b for a, b in zip(T1, T2))
    assert dyad_reconstruction(decompose_dyad(t, [T1, T2]), [T1, T2]) == outer(t)
