"""Exact minimisation of t'Dt over the standard simplex by face enumeration.

On the relative interior of a face S every local minimiser satisfies
D_S u = lam * e, e'u = 1, and then u'D_S u = lam. Enumerating all faces
therefore finds the global minimum exactly; the solution set on a face is
affine and the quadratic is constant on it.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Optional, Sequence

from .exact.linalg import solve_linear
from .exact.simplex import GE, LE, LPInstance, solve_lp
from .model import Mat, quad

MAX_ORDER = 8

Point = tuple[Fraction, ...]


@dataclass(frozen=True)
class CriticalSet:
    """Face-critical set {u on S: D_S u = value*e, e'u = 1, u_S > 0}."""

    support: tuple[int, ...]            # 0-based
    value: Fraction
    point: Point                        # a relative-interior representative in R^p
    particular: Point                   # affine description in R^p
    directions: tuple[Point, ...]

    @property
    def dimension(self) -> int:
        return len(self.directions)


@dataclass(frozen=True)
class QuadMinReport:
    minimum: Fraction
    minimizers: tuple[Point, ...]
    faces: tuple[tuple[int, ...], ...]  # 0-based supports attaining the minimum
    critical: tuple[CriticalSet, ...]   # every critical set found, in face order


@dataclass(frozen=True)
class CopositivityResult:
    copositive: bool
    minimum: Fraction
    witness: Optional[Point] = None


def _check_matrix(D) -> list[list[Fraction]]:
    D = [[Fraction(v) for v in row] for row in D]
    p = len(D)
    if p == 0 or any(len(r) != p for r in D):
        raise ValueError("matrix must be square and nonempty")
    if p > MAX_ORDER:
        raise ValueError(f"face enumeration is limited to order {MAX_ORDER}, got {p}")
    for i in range(p):
        for j in range(i + 1, p):
            if D[i][j] != D[j][i]:
                raise ValueError(f"matrix is not symmetric at [{i + 1},{j + 1}]")
    return D


def _relint_point(part: Sequence[Fraction], dirs, idx: Sequence[int]) -> Optional[list[Fraction]]:
    """A point of part + span(dirs) with all coordinates in ``idx`` positive."""
    k = len(dirs)
    # variables: c_1..c_k (free), delta; maximise delta
    rows, senses, rhs = [], [], []
    for i in idx:
        rows.append([d[i] for d in dirs] + [Fraction(-1)])
        senses.append(GE)
        rhs.append(-part[i])
    rows.append([Fraction(0)] * k + [Fraction(1)])
    senses.append(LE)
    rhs.append(Fraction(1))
    lp = LPInstance(objective=tuple([0] * k + [1]), rows=tuple(map(tuple, rows)),
                    senses=tuple(senses), rhs=tuple(rhs),
                    lower=tuple([None] * (k + 1)), maximize=True)
    out = solve_lp(lp)
    if not out.optimal or out.value <= 0:
        return None
    c = out.x[:k]
    pt = list(part)
    for ci, d in zip(c, dirs):
        if ci:
            for i in range(len(pt)):
                pt[i] += ci * d[i]
    return pt


def _face_critical(D, S: tuple[int, ...]) -> Optional[CriticalSet]:
    p = len(D)
    s = len(S)
    # unknowns: u_S (s entries), lam
    A = []
    for i in S:
        A.append([D[i][j] for j in S] + [Fraction(-1)])
    A.append([Fraction(1)] * s + [Fraction(0)])
    b = [Fraction(0)] * s + [Fraction(1)]
    sol = solve_linear(A, b)
    if sol is None:
        return None

    def embed(vec):
        full = [Fraction(0)] * p
        for pos, i in enumerate(S):
            full[i] = vec[pos]
        return tuple(full)

    lam = sol.particular[s]
    part_u = sol.particular[:s]
    dirs_u = [d[:s] for d in sol.nullspace]
    # lam is constant on the solution set (symmetry of D); keep it honest
    for d in sol.nullspace:
        if d[s] != 0:
            raise ArithmeticError("critical value varies along a face-critical set")
    if not dirs_u:
        if any(v <= 0 for v in part_u):
            return None
        point = embed(part_u)
        return CriticalSet(S, lam, point, point, ())
    local = _relint_point(part_u, dirs_u, range(s))
    if local is None:
        return None
    point = embed(local)
    crit = CriticalSet(S, lam, point, embed(part_u), tuple(embed(d) for d in dirs_u))
    other = embed(part_u)
    if quad(D, point) != lam or quad(D, other) != lam:
        raise ArithmeticError("quadratic is not constant on a face-critical set")
    return crit


def _faces(p: int):
    for size in range(1, p + 1):
        yield from combinations(range(p), size)


def min_quadratic_over_simplex(D) -> QuadMinReport:
    D = _check_matrix(D)
    crits = []
    for S in _faces(len(D)):
        c = _face_critical(D, S)
        if c is not None:
            crits.append(c)
    best = min(c.value for c in crits)
    winners = [c for c in crits if c.value == best]
    return QuadMinReport(best, tuple(c.point for c in winners),
                         tuple(c.support for c in winners), tuple(crits))


def is_copositive(D) -> CopositivityResult:
    rep = min_quadratic_over_simplex(D)
    if rep.minimum >= 0:
        return CopositivityResult(True, rep.minimum)
    return CopositivityResult(False, rep.minimum, rep.minimizers[0])


def zero_set(D) -> list[CriticalSet]:
    """All face-critical sets with value 0; their union is {t in T: t'Dt = 0}."""
    rep = min_quadratic_over_simplex(D)
    if rep.minimum < 0:
        raise ValueError("zero_set needs a copositive matrix")
    return [c for c in rep.critical if c.value == 0]


def zero_piece_vertices(D, support: Sequence[int]) -> list[Point]:
    """Vertices of the closure {u >= 0 on S, D_S u = 0, e'u = 1} of a zero piece.

    Basic solutions: subsets R of S for which the system restricted to
    columns R has a unique, strictly positive solution.
    """
    D = [[Fraction(v) for v in row] for row in D]
    p = len(D)
    S = tuple(support)
    verts = []
    for size in range(1, len(S) + 1):
        for R in combinations(S, size):
            A = [[D[i][j] for j in R] for i in S]
            A.append([Fraction(1)] * size)
            b = [Fraction(0)] * len(S) + [Fraction(1)]
            sol = solve_linear(A, b)
            if sol is None or sol.nullspace:
                continue
            if any(v <= 0 for v in sol.particular):
                continue
            full = [Fraction(0)] * p
            for pos, j in enumerate(R):
                full[j] = sol.particular[pos]
            verts.append(tuple(full))
    verts.sort(reverse=True)
    return verts


def min_quadratic_over_polytope(D, vertices: Sequence[Sequence[Fraction]]) -> QuadMinReport:
    """Exact min of t'Dt over conv(vertices) via barycentric coordinates."""
    V = [tuple(Fraction(x) for x in v) for v in vertices]
    if not V:
        raise ValueError("polytope needs at least one vertex")
    if len(set(V)) != len(V):
        raise ValueError("polytope vertices must be distinct")
    D = [[Fraction(v) for v in row] for row in D]
    p = len(D)
    DV = [[sum((D[i][k] * v[k] for k in range(p) if v[k]), Fraction(0)) for i in range(p)] for v in V]
    Q = [[sum((V[a][i] * DV[b][i] for i in range(p)), Fraction(0)) for b in range(len(V))]
         for a in range(len(V))]
    rep = min_quadratic_over_simplex(Q)

    def lift(alpha):
        t = [Fraction(0)] * p
        for w, v in zip(alpha, V):
            if w:
                for i in range(p):
                    t[i] += w * v[i]
        return tuple(t)

    crits = tuple(CriticalSet(c.support, c.value, lift(c.point), lift(c.particular),
                              tuple(lift(d) for d in c.directions)) for c in rep.critical)
    return QuadMinReport(rep.minimum, tuple(lift(a) for a in rep.minimizers), rep.faces, crits)


def integer_scaled(D) -> tuple[list[list[int]], int]:
    """Integer matrix c*D with c the lcm of denominators (same sign pattern)."""
    from math import lcm

    den = 1
    for row in D:
        for v in row:
            den = lcm(den, Fraction(v).denominator)
    return [[int(Fraction(v) * den) for v in row] for row in D], den
