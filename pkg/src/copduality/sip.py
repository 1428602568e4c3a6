"""Cutting-plane engine for  min/max c'x  s.t.  B(1, x) copositive  + finite rows.

The copositivity constraint is relaxed to t'B(1,x)t >= 0 over a finite
sample of the simplex.  Each exact LP solution is tested with the face
enumeration oracle; a negative witness becomes a new row.  A relaxed
optimum that passes the exact test is optimal for the real problem,
because every row ever added is valid for the feasible set.

Rows are lifted vectors v read as ``(1, x) . v  (sense)  0``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from . import kernels
from .copositive import is_copositive
from .exact.linalg import primitive_integer_vector
from .exact.simplex import EQ, GE, LE, LPInstance, solve_lp
from .model import CopSystem, combine, eval_constraint, lifted_a, lifted_value, quad

OPTIMAL, UNBOUNDED, INFEASIBLE, EXHAUSTED = "optimal", "unbounded", "infeasible", "budget-exhausted"


@dataclass(frozen=True)
class SIPConfig:
    max_rounds: int = 6
    grid_start: int = 8
    box_bound: Fraction = Fraction(10 ** 6)
    cuts_per_round: int = 20
    max_sample: int = 400
    snap_denominator: int = 64
    rows_per_pass: int = 6


@dataclass(frozen=True)
class Row:
    vec: tuple[Fraction, ...]
    sense: str = GE
    label: str = ""

    def value(self, x: Sequence[Fraction]) -> Fraction:
        return lifted_value(self.vec, x)

    def violation(self, x) -> Fraction:
        v = self.value(x)
        if self.sense == GE:
            return -v if v < 0 else Fraction(0)
        if self.sense == LE:
            return v if v > 0 else Fraction(0)
        return abs(v)

    def ray_violation(self, d) -> Fraction:
        v = sum((a * b for a, b in zip(self.vec[1:], d)), Fraction(0))
        if self.sense == GE:
            return -v if v < 0 else Fraction(0)
        if self.sense == LE:
            return v if v > 0 else Fraction(0)
        return abs(v)


@dataclass(frozen=True)
class SIPResult:
    status: str
    value: Optional[Fraction] = None
    x: Optional[tuple[Fraction, ...]] = None
    ray: Optional[tuple[Fraction, ...]] = None
    bound: Optional[Fraction] = None
    iterations: int = 0
    certificate: dict = field(default_factory=dict, compare=False)

    @property
    def optimal(self) -> bool:
        return self.status == OPTIMAL


def simplex_grid(p: int, denom: int) -> list[tuple[Fraction, ...]]:
    return [tuple(Fraction(u, denom) for u in comp) for comp in kernels.compositions(p, denom)]


def grid_size(p: int, denom: int) -> int:
    from math import comb
    return comb(denom + p - 1, p - 1)


def initial_denominator(p: int, config: SIPConfig) -> int:
    d = max(1, config.grid_start)
    while d > 1 and grid_size(p, d) > config.max_sample:
        d -= 1
    return d


def _snap(x: Sequence[Fraction], q: int) -> tuple[Fraction, ...]:
    return tuple(Fraction(v).limit_denominator(q) for v in x)


class CutPool:
    """Rows valid for the feasible set of one system, shared between queries.

    Holds sample rows a(t) >= 0, rows certified from immobile points, and
    every exactly-feasible point seen so far.
    """

    def __init__(self, system: CopSystem, config: SIPConfig = SIPConfig()):
        self.system = system
        self.config = config
        self.rows: list[Row] = []
        self._keys: set = set()
        self.points: list[tuple[Fraction, ...]] = []
        self.feasible: list[tuple[Fraction, ...]] = []
        self._feasible_keys: set = set()
        self.immobile: list[tuple[tuple[Fraction, ...], str]] = []
        self._immobile_keys: set = set()
        self.defining: list[Row] = []
        d = initial_denominator(system.p, config)
        for t in simplex_grid(system.p, d):
            self.add_point(t)

    def add_point(self, t: Sequence[Fraction]) -> bool:
        """Add the row t'A(x)t >= 0; returns False when already present."""
        t = tuple(Fraction(v) for v in t)
        u = primitive_integer_vector(t)
        vec = lifted_a(self.system, u)
        label = "vertex" if sum(1 for v in t if v) == 1 else "sample"
        if any(vec):
            vec = tuple(Fraction(v) for v in primitive_integer_vector(vec))
        return self.add_row(Row(vec, GE, label), point=t)

    def add_row(self, row: Row, point=None) -> bool:
        if not any(row.vec[1:]):
            # constant rows carry no information about x (or prove infeasibility)
            if row.violation([Fraction(0)] * (len(row.vec) - 1)) == 0:
                return False
        key = (row.vec, row.sense)
        if key in self._keys:
            return False
        self._keys.add(key)
        self.rows.append(row)
        if point is not None:
            self.points.append(point)
        return True

    def note_feasible(self, x: Sequence[Fraction]):
        x = tuple(Fraction(v) for v in x)
        if x not in self._feasible_keys:
            self._feasible_keys.add(x)
            self.feasible.append(x)
            self.harvest(eval_constraint(self.system, x))

    def harvest(self, D):
        """Certify zeros t of a feasible A(x) with a(t) = 0 and add their rows.

        Such t satisfy t'A(x)t = 0 for every x, so they are immobile as soon
        as the system is consistent, which D being feasible shows.
        """
        from .copositive import zero_piece_vertices, zero_set

        for piece in zero_set(D):
            verts = zero_piece_vertices(D, piece.support)
            cands = list(verts)
            for i in range(len(verts)):
                for j in range(i + 1, len(verts)):
                    cands.append(tuple((a + b) / 2 for a, b in zip(verts[i], verts[j])))
            for t in cands:
                if t not in self._immobile_keys and not any(lifted_a(self.system, t)):
                    self.add_immobile(t, "a(t) = 0")

    def add_immobile(self, t, reason: str):
        t = tuple(Fraction(v) for v in t)
        if t in self._immobile_keys:
            return
        self._immobile_keys.add(t)
        self.immobile.append((t, reason))
        for row in z_rows(self.system, t):
            self.add_row(row)

    def restricted(self, rows: Sequence[Row]) -> "CutPool":
        """Pool for the feasible subset cut out by extra linear ``rows``.

        Everything valid for the parent stays valid for the subset.
        """
        child = CutPool.__new__(CutPool)
        child.system = self.system
        child.config = self.config
        child.rows = list(self.rows)
        child._keys = set(self._keys)
        child.points = list(self.points)
        child.immobile = list(self.immobile)
        child._immobile_keys = set(self._immobile_keys)
        child.defining = list(self.defining) + list(rows)
        child.feasible = [x for x in self.feasible if not any(r.violation(x) for r in rows)]
        child._feasible_keys = set(child.feasible)
        return child

    def is_feasible(self, x) -> bool:
        return _is_feasible_point(self.system, x, self.defining)

    def bootstrap(self):
        if not self.feasible:
            zero = tuple([Fraction(0)] * self.system.n)
            if self.is_feasible(zero):
                self.note_feasible(zero)


def _is_feasible_point(system: CopSystem, x, extra: Sequence[Row]) -> bool:
    if any(r.violation(x) for r in extra):
        return False
    return is_copositive(eval_constraint(system, x)).copositive


class SIPSolver:
    """One query against a pool; new valid sample rows flow back into the pool."""

    def __init__(self, pool: CutPool, extra_rows: Sequence[Row] = (), lower=None, upper=None):
        self.pool = pool
        self.system = pool.system
        self.config = pool.config
        self.extra = list(pool.defining) + list(extra_rows)
        n = self.system.n
        self.lower = tuple(lower) if lower is not None else tuple([None] * n)
        self.upper = tuple(upper) if upper is not None else tuple([None] * n)
        self.iterations = 0
        self._working: list[int] = []

    # -- relaxation ------------------------------------------------------

    def _all_rows(self):
        return self.extra + self.pool.rows

    def _seed_working(self):
        ne = len(self.extra)
        seed = list(range(ne))
        for i, r in enumerate(self.pool.rows):
            if r.label != "sample":
                seed.append(ne + i)
        self._working = seed

    def _solve_relaxation(self, objective, maximize, lower, upper):
        rows = self._all_rows()
        if not self._working:
            self._seed_working()
        active = set(self._working)
        while True:
            work = sorted(active)
            lp = LPInstance(objective=tuple(objective),
                            rows=tuple(rows[i].vec[1:] for i in work),
                            senses=tuple(rows[i].sense for i in work),
                            rhs=tuple(-rows[i].vec[0] for i in work),
                            lower=lower, upper=upper, maximize=maximize)
            out = solve_lp(lp)
            if out.status == INFEASIBLE:
                self._working = work
                return out, work
            viol = []
            for i, r in enumerate(rows):
                if i in active:
                    continue
                v = r.violation(out.x)
                if out.status == UNBOUNDED:
                    v = v + r.ray_violation(out.ray)
                if v > 0:
                    viol.append((-v, i))
            if not viol:
                self._working = work
                return out, work
            viol.sort()
            for _, i in viol[: self.config.rows_per_pass]:
                active.add(i)

    # -- cuts ------------------------------------------------------------

    def _cut_at(self, D, round_no: int) -> bool:
        """Add the exact minimiser and a grid screening point for non-copositive D."""
        added = False
        res = is_copositive(D)
        if res.copositive:
            return False
        w = res.witness
        for q in (8, 16, 32, 64):
            approx = [v.limit_denominator(q) for v in w]
            s = sum(approx)
            if s > 0:
                approx = tuple(v / s for v in approx)
                if quad(D, approx) < 0:
                    w = approx
                    break
        added |= self.pool.add_point(w)
        denom = self.config.grid_start * (2 ** round_no)
        val, u = kernels.grid_min_float([[float(v) for v in row] for row in D], denom)
        if val < 0:
            t = tuple(Fraction(c, denom) for c in u)
            if quad(D, t) < 0:
                added |= self.pool.add_point(t)
        return added

    # -- main loops ------------------------------------------------------

    def budget(self) -> int:
        return self.config.max_rounds * self.config.cuts_per_round

    def find_feasible(self) -> SIPResult:
        """A feasible point (status optimal), a certified infeasibility, or exhaustion."""
        n = self.system.n
        cands = list(self.pool.feasible) + [tuple([Fraction(0)] * n)]
        for x in cands:
            if self._in_bounds(x) and _is_feasible_point(self.system, x, self.extra):
                self.pool.note_feasible(x)
                return SIPResult(OPTIMAL, value=Fraction(0), x=tuple(x), bound=Fraction(0))
        return self.optimize([Fraction(0)] * n)

    def _in_bounds(self, x) -> bool:
        for v, lo, up in zip(x, self.lower, self.upper):
            if lo is not None and v < lo:
                return False
            if up is not None and v > up:
                return False
        return True

    def optimize(self, objective, maximize: bool = False) -> SIPResult:
        objective = tuple(Fraction(v) for v in objective)
        n = self.system.n
        self.pool.bootstrap()
        best = None
        last_bound = None
        start = self.iterations
        while self.iterations - start < self.budget():
            round_no = (self.iterations - start) // self.config.cuts_per_round
            self.iterations += 1
            out, work = self._solve_relaxation(objective, maximize, self.lower, self.upper)
            if out.status == INFEASIBLE:
                rows = self._all_rows()
                return SIPResult(INFEASIBLE, iterations=self.iterations, certificate={
                    "rows": [rows[i] for i in work], "farkas": out.farkas})
            if out.status == UNBOUNDED:
                d = out.ray
                Bd = combine(self.system.matrices[1:], d)
                if self._cut_at(Bd, round_no):
                    continue
                if not is_copositive(Bd).copositive:
                    # witness already present yet ray survives: cannot happen with exact rows
                    raise ArithmeticError("ray survived its own cut")
                feas = self.find_feasible()
                if feas.status != OPTIMAL:
                    return SIPResult(feas.status, iterations=self.iterations, certificate={"ray": d})
                return SIPResult(UNBOUNDED, x=feas.x, ray=tuple(d), iterations=self.iterations,
                                 certificate={"recession_direction": tuple(d)})
            x = out.x
            last_bound = out.value
            D = eval_constraint(self.system, x)
            if is_copositive(D).copositive:
                self.pool.note_feasible(x)
                rows = self._all_rows()
                return SIPResult(OPTIMAL, value=out.value, x=tuple(x), bound=out.value,
                                 iterations=self.iterations,
                                 certificate={"rows": [rows[i] for i in work], "duals": out.duals})
            for q in (1, 2, 4, 8, 16, 32, self.config.snap_denominator):
                xs = _snap(x, q)
                if xs == tuple(x) or not self._in_bounds(xs):
                    continue
                if _is_feasible_point(self.system, xs, self.extra):
                    self.pool.note_feasible(xs)
                    val = sum((c * v for c, v in zip(objective, xs)), Fraction(0))
                    if best is None or (val > best[0] if maximize else val < best[0]):
                        best = (val, xs)
                    if val == out.value:
                        rows = self._all_rows()
                        return SIPResult(OPTIMAL, value=val, x=xs, bound=out.value,
                                         iterations=self.iterations,
                                         certificate={"rows": [rows[i] for i in work], "duals": out.duals})
                    break
            if not self._cut_at(D, round_no):
                raise ArithmeticError("non-copositive point produced no new cut")
        return SIPResult(EXHAUSTED, value=best[0] if best else None, x=best[1] if best else None,
                         bound=last_bound, iterations=self.iterations)


def z_rows(system: CopSystem, tau: Sequence[Fraction], label: str = "immobile") -> list[Row]:
    """Rows valid once tau is known immobile: A(x)tau >= 0, with equality on supp(tau)."""
    from .model import lifted_b

    rows = []
    for k in range(1, system.p + 1):
        b = lifted_b(system, k, tau)
        if not any(b):
            continue
        vec = tuple(Fraction(v) for v in primitive_integer_vector(b))
        rows.append(Row(vec, EQ if tau[k - 1] > 0 else GE, label))
    return rows
