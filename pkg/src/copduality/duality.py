"""Uniform LP duality: conditions I and II, cone-membership certificates, F/W sets.

cone{a(t)} need not be closed, so a finite sample that fails to produce
a combination proves nothing.  A ``not-member`` verdict always carries a
separator z with z.target < 0 and z.a(t) = t'B(z)t >= 0 on the whole
domain, checked by exact quadratic minimisation.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from .copositive import is_copositive, min_quadratic_over_polytope
from .exact.linalg import orthogonal_basis, project_onto_complement, rank
from .exact.simplex import EQ, LPInstance, solve_lp
from .immobile import (CANDIDATE, EMPTY, VERIFIED, ImmobileStructure, IndexSets, MinActiveSolution,
                       compute_M, compute_Nstar, find_immobile_set, find_min_active, omega_sample,
                       restricted_immobile, zero_pieces)
from .model import (CopSystem, combine, eval_constraint, eval_lifted, frobenius, lifted_a,
                    lifted_b, lifted_pair, lifted_value)
from .sip import CutPool, SIPConfig, simplex_grid

MEMBER, NOT_MEMBER, UNDECIDED = "member", "not-member", "undecided"
UNIFORM, NO_UNIFORM = "uniform-duality", "no-uniform-duality"

Point = tuple[Fraction, ...]


@dataclass
class ConeCertificate:
    verdict: str
    target: tuple
    domain: str                                  # "simplex" or "pieces"
    pieces: Optional[tuple] = None               # vertex lists when domain == "pieces"
    combination: tuple = ()                      # ((t, alpha), ...) with sum alpha a(t) = target
    separator: Optional[tuple] = None            # z
    domain_minima: tuple = ()                    # min t'B(z)t per piece (or over T)
    reduction: Optional[dict] = None             # feasible x with (1,x).target = 0 used to shrink T
    rounds: int = 0

    def verify(self, system: CopSystem) -> bool:
        """Re-check the certificate from scratch with exact arithmetic."""
        target = tuple(Fraction(v) for v in self.target)
        if self.verdict == MEMBER:
            acc = [Fraction(0)] * len(target)
            for t, alpha in self.combination:
                if alpha < 0 or any(v < 0 for v in t):
                    return False
                for m, v in enumerate(lifted_a(system, t)):
                    acc[m] += alpha * v
            return tuple(acc) == target
        if self.verdict == NOT_MEMBER:
            z = self.separator
            if sum((a * b for a, b in zip(z, target)), Fraction(0)) >= 0:
                return False
            B = eval_lifted(system, z)
            if self.domain == "simplex" and self.reduction is None:
                return is_copositive(B).copositive
            pieces = self.pieces
            if self.reduction is not None:
                x = self.reduction["x"]
                D = eval_constraint(system, x)
                if not is_copositive(D).copositive or lifted_value(target, x) != 0:
                    return False
                pieces = tuple(tuple(p) for p in zero_pieces(D))
            return all(min_quadratic_over_polytope(B, verts).minimum >= 0 for verts in pieces)
        return True


def _mid(u, v):
    return tuple((a + b) / 2 for a, b in zip(u, v))


def polytope_sample(pieces, levels: Sequence[int] = (2, 4)) -> list[Point]:
    """Vertices, midpoints, barycentres and barycentric grid points of each piece."""
    pts: list[Point] = []
    for verts in pieces:
        verts = [tuple(v) for v in verts]
        pts.extend(verts)
        for i in range(len(verts)):
            for j in range(i + 1, len(verts)):
                pts.append(_mid(verts[i], verts[j]))
        if len(verts) > 2:
            pts.append(tuple(sum(c) / len(verts) for c in zip(*verts)))
        if len(verts) > 1:
            for d in levels:
                for w in simplex_grid(len(verts), d):
                    pts.append(tuple(sum((wi * v[k] for wi, v in zip(w, verts)), Fraction(0))
                                     for k in range(len(verts[0]))))
    seen, out = set(), []
    for t in pts:
        if t not in seen:
            seen.add(t)
            out.append(t)
    return out


def _combination_lp(system: CopSystem, target, points):
    gens = [lifted_a(system, t) for t in points]
    rows = tuple(tuple(g[m] for g in gens) for m in range(len(target)))
    lp = LPInstance(objective=tuple([1] * len(points)), rows=rows,
                    senses=tuple(EQ for _ in target), rhs=tuple(target))
    return solve_lp(lp)


def cone_membership(system: CopSystem, target, domain: str = "simplex", pieces=None,
                    sample: Sequence[Point] = (), max_rounds: int = 30,
                    reduction: Optional[Sequence[Fraction]] = None) -> ConeCertificate:
    """Decide target in cone{a(t): t in domain} with an exact certificate.

    ``reduction`` is a feasible x with (1,x).target = 0: any combination
    must then use zeros of A(x) only, so the domain shrinks to them.
    """
    target = tuple(Fraction(v) for v in target)
    red = None
    if reduction is not None:
        x = tuple(Fraction(v) for v in reduction)
        D = eval_constraint(system, x)
        if not is_copositive(D).copositive or lifted_value(target, x) != 0:
            raise ValueError("reduction point must be feasible with (1,x).target = 0")
        pieces = tuple(tuple(p) for p in zero_pieces(D))
        domain = "pieces"
        red = {"x": x}
    if not any(target):
        return ConeCertificate(MEMBER, target, domain if red is None else "simplex",
                               pieces if domain == "pieces" else None, (), reduction=red)
    if domain == "pieces":
        pts = list(sample) + polytope_sample(pieces)
    else:
        pts = list(sample) + simplex_grid(system.p, 4)
    seen, points = set(), []
    for t in pts:
        t = tuple(Fraction(v) for v in t)
        if t not in seen:
            seen.add(t)
            points.append(t)
    report_domain = "simplex" if red is not None else domain
    for rnd in range(1, max_rounds + 1):
        out = _combination_lp(system, target, points)
        if out.optimal:
            combo = tuple((points[i], a) for i, a in enumerate(out.x) if a)
            cert = ConeCertificate(MEMBER, target, report_domain,
                                   tuple(pieces) if domain == "pieces" else None, combo,
                                   reduction=red, rounds=rnd)
            if not cert.verify(system):
                raise ArithmeticError("member certificate failed re-verification")
            return cert
        z = tuple(out.farkas)
        B = eval_lifted(system, z)
        new = []
        minima = []
        if domain == "pieces":
            for verts in pieces:
                rep = min_quadratic_over_polytope(B, verts)
                minima.append(rep.minimum)
                if rep.minimum < 0:
                    new.append(rep.minimizers[0])
        else:
            res = is_copositive(B)
            minima.append(res.minimum)
            if not res.copositive:
                new.append(res.witness)
        if not new:
            cert = ConeCertificate(NOT_MEMBER, target, report_domain,
                                   tuple(pieces) if domain == "pieces" else None,
                                   separator=z, domain_minima=tuple(minima), reduction=red, rounds=rnd)
            if not cert.verify(system):
                raise ArithmeticError("separator failed re-verification")
            return cert
        added = False
        for t in new:
            if t not in seen:
                seen.add(t)
                points.append(t)
                added = True
        if not added:
            break
    return ConeCertificate(UNDECIDED, target, report_domain,
                           tuple(pieces) if domain == "pieces" else None, reduction=red, rounds=max_rounds)


def finite_cone_membership(target, generators) -> Optional[tuple[Fraction, ...]]:
    """Nonnegative alpha with sum alpha_i g_i = target, or None (exact LP)."""
    target = tuple(Fraction(v) for v in target)
    if not generators:
        return () if not any(target) else None
    rows = tuple(tuple(Fraction(g[m]) for g in generators) for m in range(len(target)))
    lp = LPInstance(objective=tuple([1] * len(generators)), rows=rows,
                    senses=tuple(EQ for _ in target), rhs=target)
    out = solve_lp(lp)
    return out.x if out.optimal else None


# -- condition I ---------------------------------------------------------

@dataclass
class RankTestReport:
    A_columns: tuple       # ((i, j), a(i,j)) with 0-based vertex indices
    B_columns: tuple       # ((k, j), b(k,j)) with 1-based k
    rank_A: int
    rank_AB: int

    @property
    def holds(self) -> bool:
        return self.rank_A == self.rank_AB


def check_B1(system: CopSystem, imm: ImmobileStructure, M: dict) -> RankTestReport:
    A_cols = tuple(((i, j), lifted_pair(system, imm.vertices[i], imm.vertices[j])) for i, j in imm.pairs)
    B_cols = tuple(((k, j), lifted_b(system, k, imm.vertices[j]))
                   for j in range(len(imm.vertices)) for k in M[j])
    ra = rank([c for _, c in A_cols]) if A_cols else 0
    rab = rank([c for _, c in A_cols] + [c for _, c in B_cols]) if (A_cols or B_cols) else 0
    return RankTestReport(A_cols, B_cols, ra, rab)


@dataclass
class A1Report:
    target: tuple
    certificate: ConeCertificate
    U_star: Optional[tuple] = None
    residuals: Optional[tuple] = None      # A_m . U*
    complementarity: Optional[Fraction] = None  # U* . A(x*)

    @property
    def holds(self) -> Optional[bool]:
        if self.certificate.verdict == MEMBER:
            return True
        if self.certificate.verdict == NOT_MEMBER:
            return False
        return None


def _dyad_sum(terms, p):
    U = [[Fraction(0)] * p for _ in range(p)]
    for coeff, v in terms:
        for i in range(p):
            if v[i]:
                for j in range(p):
                    if v[j]:
                        U[i][j] += coeff * v[i] * v[j]
    return tuple(tuple(r) for r in U)


def check_A1(system: CopSystem, imm: ImmobileStructure, x_star=None) -> A1Report:
    """Is L = cone{a(t): t in T_im} a subspace?  Tested as w in L with
    w = -(1/4) sum_{(l,q) in V0} a(tau(l) + tau(q)); a member combination
    assembles U* with A_m . U* = 0 for every m.
    """
    n1 = system.n + 1
    w = [Fraction(0)] * n1
    sums = []
    for l, q in imm.pairs:
        s = tuple(a + b for a, b in zip(imm.vertices[l], imm.vertices[q]))
        sums.append(s)
        for m, v in enumerate(lifted_a(system, s)):
            w[m] -= v / 4
    pieces = tuple(tuple(imm.piece_vertices(s)) for s in range(len(imm.pieces)))
    cert = cone_membership(system, w, "pieces", pieces, sample=imm.sample_points())
    rep = A1Report(tuple(w), cert)
    if cert.verdict == MEMBER:
        terms = [(alpha, t) for t, alpha in cert.combination] + [(Fraction(1, 4), s) for s in sums]
        U = _dyad_sum(terms, system.p)
        rep.U_star = U
        rep.residuals = tuple(frobenius(A, U) for A in system.matrices)
        if any(rep.residuals):
            raise ArithmeticError("assembled U* does not annihilate every A_m")
        if x_star is not None:
            rep.complementarity = frobenius(eval_constraint(system, x_star), U)
    return rep


@dataclass
class ConditionI:
    a1: A1Report
    b1: RankTestReport
    direct: dict            # (k, j) -> ConeCertificate for k in M(j) over T_im
    agrees: Optional[bool]

    @property
    def holds(self) -> Optional[bool]:
        if self.b1.holds is False or self.a1.holds is False:
            return False
        if self.a1.holds is None:
            return None
        return True


def check_condition_I(system: CopSystem, imm: ImmobileStructure, M: dict, x_star=None) -> ConditionI:
    a1 = check_A1(system, imm, x_star)
    b1 = check_B1(system, imm, M)
    pieces = tuple(tuple(imm.piece_vertices(s)) for s in range(len(imm.pieces)))
    direct = {}
    for j, tau in enumerate(imm.vertices):
        for k in M[j]:
            direct[(k, j)] = cone_membership(system, lifted_b(system, k, tau), "pieces", pieces,
                                             sample=imm.sample_points())
    verdicts = {c.verdict for c in direct.values()}
    direct_holds = None
    if NOT_MEMBER in verdicts:
        direct_holds = False
    elif verdicts <= {MEMBER}:
        direct_holds = True
    res = ConditionI(a1, b1, direct, None)
    if res.holds is not None and direct_holds is not None:
        res.agrees = res.holds == direct_holds
        if not res.agrees:
            raise ArithmeticError("condition I via A1/B1 disagrees with direct membership")
    return res


# -- condition II and the direct criterion ------------------------------

@dataclass
class RestrictedCase:
    k: int
    j: int
    structure: ImmobileStructure
    certificate: ConeCertificate


def check_condition_II(system: CopSystem, pool: CutPool, imm: ImmobileStructure,
                       idx: IndexSets) -> tuple[list[RestrictedCase], Optional[bool]]:
    cases = []
    for j in range(len(imm.vertices)):
        for k in idx.N[j]:
            sub, _ = restricted_immobile(pool, imm, k, j, idx.x_kj[(k, j)])
            pieces = tuple(tuple(sub.piece_vertices(s)) for s in range(len(sub.pieces)))
            if sub.empty:
                cert = cone_membership(system, lifted_b(system, k, imm.vertices[j]), "pieces", ())
            else:
                cert = cone_membership(system, lifted_b(system, k, imm.vertices[j]), "pieces", pieces,
                                       sample=sub.sample_points())
            cases.append(RestrictedCase(k, j, sub, cert))
    verdicts = {c.certificate.verdict for c in cases}
    if NOT_MEMBER in verdicts:
        return cases, False
    if UNDECIDED in verdicts:
        return cases, None
    return cases, True


def check_cond2(system: CopSystem, imm: ImmobileStructure, idx: IndexSets,
                relint_points: dict) -> dict:
    """b(k,j) in cone{a(t): t in T} for every k in N_*(j).

    ``relint_points[(k, j)]`` is a feasible x with (1,x).b(k,j) = 0 and a
    zero set as small as possible; it shrinks T without losing generality.
    """
    out = {}
    for j, tau in enumerate(imm.vertices):
        for k in idx.Nstar[j]:
            b = lifted_b(system, k, tau)
            x = relint_points.get((k, j))
            if x is None:
                out[(k, j)] = cone_membership(system, b, "simplex")
            else:
                out[(k, j)] = cone_membership(system, b, reduction=x)
    return out


# -- the verdict ---------------------------------------------------------

@dataclass
class DualityVerdict:
    overall: str
    immobile: ImmobileStructure
    index_sets: Optional[IndexSets] = None
    min_active: Optional[MinActiveSolution] = None
    condition_I: Optional[ConditionI] = None
    condition_II: list = field(default_factory=list)
    condition_II_holds: Optional[bool] = None
    cond2: dict = field(default_factory=dict)
    cond2_agrees: Optional[bool] = None
    m_certificates: dict = field(default_factory=dict)
    caveat: Optional[str] = None
    reasons: list = field(default_factory=list)
    pool: Optional[CutPool] = None


def analyze(system: CopSystem, config: SIPConfig = SIPConfig(), use_hint: bool = True) -> DualityVerdict:
    pool = CutPool(system, config)
    hint = system.immobile_hint if use_hint else None
    if hint is not None:
        for poly in hint:
            for t in poly:
                pool.add_point(t)
    imm = find_immobile_set(pool, hint=hint)
    if imm.status == EMPTY:
        return DualityVerdict(UNIFORM, imm, reasons=["T_im is empty: the Slater condition holds"], pool=pool)
    if imm.empty:
        return DualityVerdict(UNDECIDED, imm, reasons=["no feasible point found"], pool=pool)

    M, mcerts = compute_M(system, imm)
    idx = compute_Nstar(pool, imm, M)
    idx.m_certificates = mcerts
    minact = find_min_active(pool, imm, M)
    cond1 = check_condition_I(system, imm, M, minact.x)
    cases, cond2_holds = check_condition_II(system, pool, imm, idx)

    relint = {}
    for j in range(len(imm.vertices)):
        for k in idx.Nstar[j]:
            relint[(k, j)] = minact.x if k in M[j] else None
    for c in cases:
        relint[(c.k, c.j)] = c.structure.x_bar
    direct = check_cond2(system, imm, idx, relint)

    verdict = DualityVerdict(UNDECIDED, imm, idx, minact, cond1, cases, cond2_holds, direct,
                             m_certificates=mcerts, pool=pool)
    reasons = verdict.reasons
    if cond1.holds is False:
        if not cond1.b1.holds:
            reasons.append(f"B1 fails: rank A = {cond1.b1.rank_A} < rank (A,B) = {cond1.b1.rank_AB}")
        if cond1.a1.holds is False:
            reasons.append("A1 fails: cone{a(t): t in T_im} is not a subspace")
    for c in cases:
        if c.certificate.verdict == NOT_MEMBER:
            reasons.append(f"condition II fails at (k,j) = ({c.k},{c.j + 1})")
    if idx.undecided:
        reasons.append("some N_* memberships undecided: " + ", ".join(f"({k},{j + 1})" for k, j in idx.undecided))

    if cond1.holds is False or cond2_holds is False:
        overall = NO_UNIFORM
    elif cond1.holds and cond2_holds and not idx.undecided:
        overall = UNIFORM
    else:
        overall = UNDECIDED
    d_verdicts = {c.verdict for c in direct.values()}
    if UNDECIDED not in d_verdicts and overall != UNDECIDED:
        verdict.cond2_agrees = (d_verdicts <= {MEMBER}) == (overall == UNIFORM)
        if not verdict.cond2_agrees:
            raise ArithmeticError("direct criterion disagrees with conditions I and II")
    if imm.status != VERIFIED or minact.status != VERIFIED:
        verdict.caveat = "immobile set is a candidate, not verified"
        reasons.append(f"tentative verdict {overall} withheld: {verdict.caveat}")
        overall = UNDECIDED
    verdict.overall = overall
    return verdict


# -- F / W sets ----------------------------------------------------------

@dataclass
class DuffinFW:
    F: tuple                  # ((k, j), b(k,j)) for k in M(j)
    W_tilde: tuple           # (label, vector)
    W: tuple                 # projections onto L-perp, same order as W_tilde
    L_basis: tuple
    Lperp_basis: tuple
    x_bar: Optional[tuple]
    f_on_hyperplane: bool     # s0 + s'x_bar = 0 on F
    w_positive: bool          # t0 + t'x_bar > 0 on W
    orthogonal: bool          # s.t = 0 for s in F, t in W
    cone_inclusion: Optional[bool]  # cone(F u W~) in cone(G), via b(k,j) memberships
    omega_points: int = 0

    @property
    def passes(self) -> bool:
        return self.f_on_hyperplane and self.w_positive and self.orthogonal and bool(self.cone_inclusion)


def _complement_basis(basis, dim):
    """Orthogonal basis of the complement of span(basis) in Q^dim."""
    out = list(basis)
    comp = []
    for i in range(dim):
        e = [Fraction(int(i == k)) for k in range(dim)]
        r = project_onto_complement(e, out)
        if any(r):
            out.append(r)
            comp.append(tuple(r))
    return comp


def duffin_fw(system: CopSystem, imm: ImmobileStructure, idx: Optional[IndexSets],
              x_bar, cond2: Optional[dict] = None, omega_denominator: int = 8) -> DuffinFW:
    n1 = system.n + 1
    F = []
    Wt = []
    if not imm.empty and idx is not None:
        for j, tau in enumerate(imm.vertices):
            for k in idx.M[j]:
                F.append(((k, j), lifted_b(system, k, tau)))
    omega = omega_sample(imm, system.p, omega_denominator)
    for t in omega:
        Wt.append((("a", t), lifted_a(system, t)))
    if not imm.empty and idx is not None:
        for j, tau in enumerate(imm.vertices):
            for k in idx.N[j]:
                Wt.append((("b", (k, j)), lifted_b(system, k, tau)))
    Wt.append((("e0",), tuple([Fraction(1)] + [Fraction(0)] * (n1 - 1))))
    L = orthogonal_basis([v for _, v in F])
    W = [tuple(project_onto_complement(v, L)) for _, v in Wt]
    Lperp = _complement_basis(L, n1)
    xb = tuple(Fraction(v) for v in x_bar) if x_bar is not None else tuple([Fraction(0)] * system.n)
    f_ok = all(lifted_value(v, xb) == 0 for _, v in F)
    w_ok = all(lifted_value(v, xb) > 0 for v in W)
    orth = all(sum((a * b for a, b in zip(s, t)), Fraction(0)) == 0 for _, s in F for t in W)
    incl = None
    if cond2 is not None:
        verdicts = {c.verdict for c in cond2.values()}
        incl = True if verdicts <= {MEMBER} else (False if NOT_MEMBER in verdicts else None)
    elif imm.empty:
        incl = True
    return DuffinFW(tuple(F), tuple(Wt), tuple(W), tuple(tuple(v) for v in L), tuple(Lperp),
                    xb, f_ok, w_ok, orth, incl, len(omega))


# -- dyad decomposition --------------------------------------------------

def barycentric(t, vertices) -> tuple[Fraction, ...]:
    t = tuple(Fraction(v) for v in t)
    r = len(vertices)
    rows = [tuple(Fraction(v[k]) for v in vertices) for k in range(len(t))]
    rows.append(tuple([Fraction(1)] * r))
    lp = LPInstance(objective=tuple([0] * r), rows=tuple(rows),
                    senses=tuple(EQ for _ in rows), rhs=t + (Fraction(1),))
    out = solve_lp(lp)
    if not out.optimal:
        raise ValueError("point lies outside the polytope")
    return out.x


def decompose_dyad(t, vertices) -> dict:
    """beta with t t' = sum_{l<=q} beta_lq (v_l + v_q)(v_l + v_q)'.

    Off-diagonal beta_lq = alpha_l alpha_q; diagonal beta_ll = alpha_l (2 alpha_l - 1) / 4,
    where alpha are barycentric coordinates of t.
    """
    alpha = barycentric(t, vertices)
    r = len(vertices)
    beta = {}
    for l in range(r):
        beta[(l, l)] = alpha[l] * (2 * alpha[l] - 1) / 4
        for q in range(l + 1, r):
            beta[(l, q)] = alpha[l] * alpha[q]
    return beta


def dyad_reconstruction(beta: dict, vertices) -> tuple:
    p = len(vertices[0])
    terms = []
    for (l, q), b in beta.items():
        s = tuple(Fraction(a) + Fraction(c) for a, c in zip(vertices[l], vertices[q]))
        terms.append((b, s))
    return _dyad_sum(terms, p)


def outer(t) -> tuple:
    t = [Fraction(v) for v in t]
    return tuple(tuple(a * b for b in t) for a in t)
