"""Immobile indices: T_im, its polytope pieces, and the index sets M, N_*, N.

T_im is contained in the zero set of A(x) for every feasible x, and equals
it when x lies in the relative interior of the feasible set.  The search
keeps a feasible point x_bar, takes the zero set of A(x_bar) as candidate,
and certifies every piece by checking its vertices and pairwise midpoints.
A point that turns out mobile comes with a feasible x where it is
positive; averaging x_bar with that x shrinks the zero set.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import ceil
from typing import Optional, Sequence

from .copositive import zero_piece_vertices, zero_set
from .exact.simplex import EQ, GE, LE, LPInstance, solve_lp
from .model import CopSystem, bilinear, eval_constraint, lifted_a, lifted_b, lifted_value, quad
from .sip import (EXHAUSTED, INFEASIBLE, OPTIMAL, UNBOUNDED, CutPool, Row, SIPConfig,
                  SIPSolver, simplex_grid)

Point = tuple[Fraction, ...]

VERIFIED, CANDIDATE, EMPTY = "verified-exact", "candidate", "empty"


class InconsistentSystem(ValueError):
    """The feasible set is empty (certified by an exact Farkas argument)."""


@dataclass(frozen=True)
class PointCertificate:
    point: Point
    immobile: Optional[bool]          # None = undecided
    method: str                        # "a(t)=0", "sip", "known-point"
    witness_x: Optional[Point] = None  # feasible x with t'A(x)t > 0 when mobile
    value: Optional[Fraction] = None   # sup of t'A(x)t when decided by the engine


@dataclass
class ImmobileStructure:
    vertices: tuple[Point, ...] = ()
    pieces: tuple[tuple[int, ...], ...] = ()    # J(s), 0-based into vertices
    pairs: tuple[tuple[int, int], ...] = ()     # V_0, 0-based, l <= q
    sigma: Optional[Fraction] = None
    status: str = CANDIDATE
    x_bar: Optional[Point] = None               # feasible, zero set of A(x_bar) = union of pieces
    certificates: tuple[PointCertificate, ...] = ()
    slater: dict = field(default_factory=dict)
    hint_confirmed: Optional[bool] = None
    notes: list = field(default_factory=list)

    @property
    def empty(self) -> bool:
        return not self.vertices

    def piece_vertices(self, s: int) -> list[Point]:
        return [self.vertices[j] for j in self.pieces[s]]

    def sample_points(self) -> list[Point]:
        """Vertices, same-piece midpoints and piece barycentres (all in T_im)."""
        pts: list[Point] = list(self.vertices)
        for l, q in self.pairs:
            if l != q:
                pts.append(_mid(self.vertices[l], self.vertices[q]))
        for piece in self.pieces:
            if len(piece) > 2:
                vs = [self.vertices[j] for j in piece]
                pts.append(tuple(sum(c) / len(vs) for c in zip(*vs)))
        seen, out = set(), []
        for t in pts:
            if t not in seen:
                seen.add(t)
                out.append(t)
        return out


def _mid(u, v) -> Point:
    return tuple((a + b) / 2 for a, b in zip(u, v))


def _avg(points: Sequence[Sequence[Fraction]]) -> Point:
    k = len(points)
    return tuple(sum(c, Fraction(0)) / k for c in zip(*points))


# -- point certification -------------------------------------------------

def is_immobile_point(pool: CutPool, t: Sequence[Fraction]) -> PointCertificate:
    """Decide sup_{x in X} t'A(x)t = 0 for the pool's feasible set X."""
    t = tuple(Fraction(v) for v in t)
    a = lifted_a(pool.system, t)
    if not any(a):
        pool.add_immobile(t, "a(t) = 0")
        return PointCertificate(t, True, "a(t)=0", value=Fraction(0))
    for x in pool.feasible:
        if lifted_value(a, x) > 0:
            return PointCertificate(t, False, "known-point", witness_x=x, value=None)
    res = SIPSolver(pool).optimize(a[1:], maximize=True)
    if res.status == OPTIMAL:
        val = res.value + a[0]
        if val == 0:
            pool.add_immobile(t, "sup t'A(x)t = 0")
            return PointCertificate(t, True, "sip", value=Fraction(0))
        return PointCertificate(t, False, "sip", witness_x=res.x, value=val)
    if res.status == UNBOUNDED:
        slope = sum((c * d for c, d in zip(a[1:], res.ray)), Fraction(0))
        base = lifted_value(a, res.x)
        s = max(Fraction(1), Fraction(ceil(-base / slope)) + 1) if base <= 0 else Fraction(1)
        x = tuple(xi + s * di for xi, di in zip(res.x, res.ray))
        pool.note_feasible(x)
        return PointCertificate(t, False, "sip", witness_x=x, value=None)
    if res.status == INFEASIBLE:
        raise InconsistentSystem("feasible set is empty")
    return PointCertificate(t, None, "sip")


# -- zero-set pieces -----------------------------------------------------

def _in_closure(D, support, u) -> bool:
    S = set(support)
    if any(v != 0 and i not in S for i, v in enumerate(u)):
        return False
    p = len(D)
    return all(sum((D[i][j] * u[j] for j in range(p) if u[j]), Fraction(0)) == 0 for i in S)


def zero_pieces(D) -> list[list[Point]]:
    """Maximal polytopes whose union is {t in T: t'Dt = 0}, as vertex lists."""
    crit = zero_set(D)
    closures = []
    for c in crit:
        closures.append((c.support, zero_piece_vertices(D, c.support)))
    keep = []
    for i, (S, verts) in enumerate(closures):
        dominated = False
        for j, (S2, verts2) in enumerate(closures):
            if i == j:
                continue
            if all(_in_closure(D, S2, v) for v in verts):
                # contained in closure j; break ties between equal closures by index
                if not all(_in_closure(D, S, v) for v in verts2) or j < i:
                    dominated = True
                    break
        if not dominated:
            keep.append(verts)
    return _merge_shared(D, keep)


def _merge_shared(D, pieces: list[list[Point]]) -> list[list[Point]]:
    """Merge pieces sharing a vertex when their hull still lies in the zero set."""
    pieces = [sorted(set(p), reverse=True) for p in pieces]
    changed = True
    while changed:
        changed = False
        for i in range(len(pieces)):
            for j in range(i + 1, len(pieces)):
                if not set(pieces[i]) & set(pieces[j]):
                    continue
                union = sorted(set(pieces[i]) | set(pieces[j]), reverse=True)
                if all(bilinear(D, u, v) == 0 for u in union for v in union):
                    pieces[i] = union
                    del pieces[j]
                    changed = True
                    break
            if changed:
                break
    pieces.sort(key=lambda p: p, reverse=True)
    return pieces


def assemble_structure(pieces: list[list[Point]]) -> tuple:
    verts = sorted({v for p in pieces for v in p}, reverse=True)
    index = {v: i for i, v in enumerate(verts)}
    J = sorted(tuple(sorted(index[v] for v in p)) for p in pieces)
    pairs = sorted({(piece[a], piece[b]) for piece in J
                    for a in range(len(piece)) for b in range(a, len(piece))})
    sigma = min((c for v in verts for c in v if c > 0), default=None)
    return tuple(verts), tuple(J), tuple(pairs), sigma


# -- Slater probe --------------------------------------------------------

def slater_probe(pool: CutPool) -> dict:
    """Maximise mu s.t. A(x) - mu*E copositive, 0 <= mu <= 1 (E = all ones).

    mu* > 0 certifies the Slater condition (strictly copositive A(x));
    a certified optimum mu* = 0 refutes it.
    """
    sys = pool.system
    p, n = sys.p, sys.n
    E = tuple(tuple(Fraction(-1) for _ in range(p)) for _ in range(p))
    aug = CopSystem(sys.matrices + (E,), name=sys.name + "+margin")
    apool = CutPool(aug, pool.config)
    for r in pool.rows:
        apool.add_row(Row(r.vec + (Fraction(0),), r.sense, r.label))
    apool.defining = [Row(r.vec + (Fraction(0),), r.sense, r.label) for r in pool.defining]
    apool.feasible = [x + (Fraction(0),) for x in pool.feasible]
    apool._feasible_keys = set(apool.feasible)
    lower = tuple([None] * n) + (Fraction(0),)
    upper = tuple([None] * n) + (Fraction(1),)
    solver = SIPSolver(apool, lower=lower, upper=upper)
    res = solver.optimize(tuple([0] * n) + (1,), maximize=True)
    out = {"status": res.status, "iterations": res.iterations}
    if res.status == OPTIMAL:
        mu = res.value
        x = res.x[:n]
        pool.note_feasible(x)
        out.update(margin=mu, x=x, holds=mu > 0)
    elif res.status == INFEASIBLE:
        raise InconsistentSystem("feasible set is empty")
    else:
        out.update(holds=None, bound=res.bound)
        if res.x is not None:
            out["x"] = res.x[:n]
    return out


# -- the search ----------------------------------------------------------

def find_immobile_set(pool: CutPool, start: Optional[Sequence[Fraction]] = None,
                      probe: bool = True, hint=None, max_refinements: int = 50) -> ImmobileStructure:
    result = ImmobileStructure()
    if start is not None and pool.is_feasible(start):
        x_bar = tuple(Fraction(v) for v in start)
        pool.note_feasible(x_bar)
    else:
        feas = SIPSolver(pool).find_feasible()
        if feas.status == INFEASIBLE:
            raise InconsistentSystem("feasible set is empty")
        if feas.status != OPTIMAL:
            result.notes.append("no feasible point found within budget")
            return result
        x_bar = feas.x

    if probe:
        result.slater = slater_probe(pool)
        if result.slater.get("holds"):
            result.status = EMPTY
            result.x_bar = result.slater["x"]
            return result
        if result.slater.get("x") is not None and pool.is_feasible(result.slater["x"]):
            x_bar = _avg([x_bar, result.slater["x"]])

    certs: dict[Point, PointCertificate] = {}
    undecided = False
    for _ in range(max_refinements):
        D = eval_constraint(pool.system, x_bar)
        pieces = zero_pieces(D)
        if not pieces:
            result.status = EMPTY
            result.x_bar = x_bar
            result.certificates = tuple(certs.values())
            if probe and result.slater.get("holds") is False:
                raise ArithmeticError("Slater refuted but a strictly copositive A(x) exists")
            return result
        moved = False
        undecided = False
        for verts in pieces:
            pts = list(verts)
            for i in range(len(verts)):
                for j in range(i + 1, len(verts)):
                    pts.append(_mid(verts[i], verts[j]))
            if len(verts) > 2:
                pts.append(_avg(verts))
            for t in pts:
                cert = certs.get(t)
                if cert is None or cert.immobile is None:
                    cert = is_immobile_point(pool, t)
                    certs[t] = cert
                if cert.immobile is False:
                    x_bar = _avg([x_bar, cert.witness_x])
                    pool.note_feasible(x_bar)
                    moved = True
                    break
                if cert.immobile is None:
                    undecided = True
            if moved:
                break
        if moved:
            continue
        verts, J, pairs, sigma = assemble_structure(pieces)
        result.vertices, result.pieces, result.pairs, result.sigma = verts, J, pairs, sigma
        result.x_bar = x_bar
        result.status = CANDIDATE if undecided else VERIFIED
        result.certificates = tuple(certs[t] for t in sorted(certs, reverse=True))
        if hint is not None:
            result.hint_confirmed = _same_pieces(hint, [result.piece_vertices(s) for s in range(len(J))])
        return result
    result.notes.append("refinement budget exhausted")
    D = eval_constraint(pool.system, x_bar)
    pieces = zero_pieces(D)
    verts, J, pairs, sigma = assemble_structure(pieces)
    result.vertices, result.pieces, result.pairs, result.sigma = verts, J, pairs, sigma
    result.x_bar = x_bar
    result.status = CANDIDATE
    result.certificates = tuple(certs[t] for t in sorted(certs, reverse=True))
    return result


def _same_pieces(hint, pieces) -> bool:
    a = sorted(tuple(sorted(tuple(Fraction(c) for c in v) for v in p)) for p in hint)
    b = sorted(tuple(sorted(p)) for p in pieces)
    return a == b


# -- index sets ----------------------------------------------------------

@dataclass
class IndexSets:
    M: dict            # j -> tuple of 1-based k
    Nstar: dict        # j -> tuple of 1-based k
    N: dict            # j -> tuple of 1-based k
    x_kj: dict         # (k, j) -> feasible point with b(k,j).(1,x) = 0
    undecided: list    # (k, j) pairs the engine could not settle
    m_certificates: dict = field(default_factory=dict)


def z_polyhedron_rows(system: CopSystem, imm: ImmobileStructure) -> list[Row]:
    return [Row(lifted_b(system, k, tau), GE, f"b({k},{j + 1})")
            for j, tau in enumerate(imm.vertices) for k in range(1, system.p + 1)]


def compute_M(system: CopSystem, imm: ImmobileStructure) -> tuple[dict, dict]:
    """k in M(j) iff max (1,x).b(k,j) over Z = {x: A(x)tau(j') >= 0} is 0 (exact LP)."""
    zrows = z_polyhedron_rows(system, imm)
    n = system.n
    M, certs = {}, {}
    for j, tau in enumerate(imm.vertices):
        members = []
        for k in range(1, system.p + 1):
            b = lifted_b(system, k, tau)
            lp = LPInstance(objective=b[1:], rows=tuple(r.vec[1:] for r in zrows),
                            senses=tuple(GE for _ in zrows), rhs=tuple(-r.vec[0] for r in zrows),
                            lower=tuple([None] * n), maximize=True, constant=b[0])
            out = solve_lp(lp)
            if out.status == INFEASIBLE:
                raise InconsistentSystem("Z is empty, so the feasible set is too")
            certs[(k, j)] = {"status": out.status,
                             "value": out.value if out.optimal else None,
                             "duals": out.duals if out.optimal else None,
                             "ray": out.ray}
            if out.optimal and out.value == 0:
                members.append(k)
        M[j] = tuple(members)
        support = {k + 1 for k, v in enumerate(tau) if v > 0}
        if not support <= set(members):
            raise ArithmeticError(f"support of tau({j + 1}) not inside M({j + 1})")
    return M, certs


def compute_Nstar(pool: CutPool, imm: ImmobileStructure, M: dict) -> IndexSets:
    system = pool.system
    Nstar, N, xkj, undecided = {}, {}, {}, []
    for j, tau in enumerate(imm.vertices):
        members = []
        for k in range(1, system.p + 1):
            if k in M[j]:
                members.append(k)
                xkj[(k, j)] = imm.x_bar
                continue
            b = lifted_b(system, k, tau)
            hit = next((x for x in pool.feasible if lifted_value(b, x) == 0), None)
            if hit is not None:
                members.append(k)
                xkj[(k, j)] = hit
                continue
            res = SIPSolver(pool).optimize(b[1:], maximize=False)
            if res.status == OPTIMAL:
                if res.value + b[0] == 0:
                    members.append(k)
                    xkj[(k, j)] = res.x
            elif res.status == UNBOUNDED:
                raise ArithmeticError("e_k'A(x)tau is unbounded below on the feasible set")
            else:
                undecided.append((k, j))
        Nstar[j] = tuple(members)
        N[j] = tuple(k for k in members if k not in M[j])
    return IndexSets(M, Nstar, N, xkj, undecided)


def restricted_pool(pool: CutPool, imm: ImmobileStructure, k: int, j: int) -> CutPool:
    b = lifted_b(pool.system, k, imm.vertices[j])
    return pool.restricted([Row(b, EQ, f"b({k},{j + 1}) = 0")])


def restricted_immobile(pool: CutPool, imm: ImmobileStructure, k: int, j: int,
                        start: Sequence[Fraction]) -> tuple[ImmobileStructure, CutPool]:
    """T_im(k, j) for X(k, j) = {x in X: e_k'A(x)tau(j) = 0}; x_bar is x*(k, j)."""
    child = restricted_pool(pool, imm, k, j)
    sub = find_immobile_set(child, start=start, probe=False)
    return sub, child


# -- minimally active point ----------------------------------------------

@dataclass
class MinActiveSolution:
    x: Point
    zero_pattern_ok: bool
    strict: dict          # (k, j) -> e_k'A(x)tau(j) for k not in M(j)
    margin: Optional[Fraction]
    omega_points: int
    status: str


def l1_distance_to_hull(t: Sequence[Fraction], vertices: Sequence[Point]) -> Fraction:
    """min over tau in conv(vertices) of sum_k |t_k - tau_k| (exact LP)."""
    p = len(t)
    r = len(vertices)
    # variables: lambda_1..r >= 0, s_1..p >= 0
    rows, senses, rhs = [], [], []
    rows.append([Fraction(1)] * r + [Fraction(0)] * p)
    senses.append(EQ)
    rhs.append(Fraction(1))
    for k in range(p):
        coeff = [v[k] for v in vertices]
        unit = [Fraction(int(i == k)) for i in range(p)]
        rows.append(coeff + unit)           # s_k + tau_k >= t_k
        senses.append(GE)
        rhs.append(Fraction(t[k]))
        rows.append([-c for c in coeff] + unit)  # s_k - tau_k >= -t_k
        senses.append(GE)
        rhs.append(-Fraction(t[k]))
    lp = LPInstance(objective=tuple([0] * r + [1] * p), rows=tuple(map(tuple, rows)),
                    senses=tuple(senses), rhs=tuple(rhs))
    out = solve_lp(lp)
    return out.value


def omega_sample(imm: ImmobileStructure, p: int, denom: int) -> list[Point]:
    """Grid points of denominator ``denom`` at l1-distance >= sigma from conv T_im."""
    grid = simplex_grid(p, denom)
    if imm.empty:
        return grid
    return [t for t in grid if l1_distance_to_hull(t, imm.vertices) >= imm.sigma]


def find_min_active(pool: CutPool, imm: ImmobileStructure, M: dict,
                    omega_denominator: int = 8) -> MinActiveSolution:
    """Feasible x with zero set T_im, zeros exactly at k in M(j), positive elsewhere.

    Built as an average of x_bar with feasible points that make each
    e_k'A(x)tau(j), k not in M(j), positive.
    """
    system = pool.system
    pts = [imm.x_bar]
    status = VERIFIED if imm.status == VERIFIED else CANDIDATE
    for j, tau in enumerate(imm.vertices):
        for k in range(1, system.p + 1):
            if k in M[j]:
                continue
            b = lifted_b(system, k, tau)
            if any(lifted_value(b, x) > 0 for x in pts):
                continue
            hit = next((x for x in pool.feasible if lifted_value(b, x) > 0), None)
            if hit is None:
                res = SIPSolver(pool).optimize(b[1:], maximize=True)
                if res.status == OPTIMAL and res.value + b[0] > 0:
                    hit = res.x
                elif res.status == UNBOUNDED:
                    hit = tuple(x + d for x, d in zip(res.x, res.ray))
                    base = lifted_value(b, hit)
                    if base <= 0:
                        slope = sum((c * d for c, d in zip(b[1:], res.ray)), Fraction(0))
                        s = Fraction(ceil(-base / slope)) + 1
                        hit = tuple(x + s * d for x, d in zip(hit, res.ray))
                else:
                    status = CANDIDATE
            if hit is not None:
                pts.append(hit)
    x = _avg(pts)
    if not pool.is_feasible(x):
        raise ArithmeticError("average of feasible points is infeasible")
    pool.note_feasible(x)
    D = eval_constraint(system, x)
    ok = True
    strict = {}
    for j, tau in enumerate(imm.vertices):
        col = [sum((D[k][i] * tau[i] for i in range(system.p)), Fraction(0)) for k in range(system.p)]
        for k in range(1, system.p + 1):
            if k in M[j]:
                ok &= col[k - 1] == 0
            else:
                strict[(k, j)] = col[k - 1]
                if col[k - 1] <= 0:
                    ok = False
                    status = CANDIDATE
    omega = omega_sample(imm, system.p, omega_denominator)
    margin = min((quad(D, t) for t in omega), default=None)
    if margin is not None and margin <= 0:
        status = CANDIDATE
    if not ok:
        status = CANDIDATE
    return MinActiveSolution(x, ok, strict, margin, len(omega), status)
