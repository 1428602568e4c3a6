"""Primal values by the SIP engine, dual lower bounds by finite completely positive atoms."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from .exact.simplex import EQ, LPInstance, solve_lp
from .model import CopSystem, certified_dual_value, eval_constraint, frobenius, lifted_a
from .copositive import is_copositive
from .sip import EXHAUSTED, INFEASIBLE, OPTIMAL, UNBOUNDED, CutPool, SIPConfig, SIPSolver, simplex_grid

Point = tuple[Fraction, ...]

STABLE_TOL = 1e-9


@dataclass
class CPWitness:
    atoms: tuple                     # ((alpha, t), ...)
    U: tuple
    residuals: tuple                 # A_m . U - c_m, m = 1..n
    objective: Fraction              # -A_0 . U

    def verify(self, system: CopSystem, cost) -> bool:
        if any(a <= 0 or any(v < 0 for v in t) for a, t in self.atoms):
            return False
        U = assemble(self.atoms, system.p)
        if U != self.U:
            return False
        res = tuple(frobenius(A, U) - Fraction(c) for A, c in zip(system.matrices[1:], cost))
        return not any(res) and self.objective == -frobenius(system.matrices[0], U)


@dataclass
class PrimalResult:
    status: str
    value: Optional[Fraction] = None
    x: Optional[Point] = None
    ray: Optional[Point] = None
    exact: bool = False
    iterations: int = 0


@dataclass
class DualResult:
    status: str
    level: int
    value: Optional[Fraction] = None
    witness: Optional[CPWitness] = None
    atoms_considered: int = 0


@dataclass
class GapReport:
    cost: Point
    primal: PrimalResult
    dual: Optional[DualResult]
    levels: list = field(default_factory=list)      # DualResult per level
    certified_dual: Optional[Fraction] = None
    gap: Optional[Fraction] = None                  # exact when both ends are exact
    gap_kind: str = "unknown"                       # exact | upper-bound | unknown
    stabilized: bool = False
    weak_duality_checked: int = 0


def assemble(atoms, p: int) -> tuple:
    U = [[Fraction(0)] * p for _ in range(p)]
    for a, t in atoms:
        for i in range(p):
            if t[i]:
                for j in range(p):
                    if t[j]:
                        U[i][j] += a * t[i] * t[j]
    return tuple(tuple(r) for r in U)


def solve_primal(system: CopSystem, cost: Sequence, config: SIPConfig = SIPConfig(),
                 pool: Optional[CutPool] = None) -> PrimalResult:
    """min c'x s.t. A(x) copositive."""
    cost = tuple(Fraction(c) for c in cost)
    if len(cost) != system.n:
        raise ValueError(f"cost needs {system.n} entries, got {len(cost)}")
    pool = pool or CutPool(system, config)
    res = SIPSolver(pool).optimize(cost, maximize=False)
    if res.status == OPTIMAL:
        if not is_copositive(eval_constraint(system, res.x)).copositive:
            raise ArithmeticError("primal point is not feasible")
        return PrimalResult(OPTIMAL, res.value, res.x, exact=True, iterations=res.iterations)
    if res.status == UNBOUNDED:
        return PrimalResult(UNBOUNDED, ray=res.ray, iterations=res.iterations)
    return PrimalResult(res.status, value=res.bound, iterations=res.iterations)


def dual_atoms(p: int, level: int) -> list[Point]:
    """Grid of denominator 2^level * p plus all vertices and edge midpoints."""
    if level < 1:
        raise ValueError("level must be >= 1")
    pts = simplex_grid(p, (2 ** level) * p)
    extra = simplex_grid(p, 2)
    seen = set(pts)
    pts.extend(t for t in extra if t not in seen)
    return pts


def solve_dual_discretized(system: CopSystem, cost: Sequence, level: int) -> DualResult:
    """max -A_0.U over U = sum alpha t t', t in the level grid, A_m.U = c_m (exact LP)."""
    cost = tuple(Fraction(c) for c in cost)
    atoms = dual_atoms(system.p, level)
    lifted = [lifted_a(system, t) for t in atoms]
    rows = tuple(tuple(g[m] for g in lifted) for m in range(1, system.n + 1))
    lp = LPInstance(objective=tuple(-g[0] for g in lifted), rows=rows,
                    senses=tuple(EQ for _ in rows), rhs=cost, maximize=True)
    out = solve_lp(lp)
    if out.status != OPTIMAL:
        return DualResult(out.status, level, atoms_considered=len(atoms))
    chosen = tuple((a, atoms[i]) for i, a in enumerate(out.x) if a)
    U = assemble(chosen, system.p)
    res = tuple(frobenius(A, U) - c for A, c in zip(system.matrices[1:], cost))
    w = CPWitness(chosen, U, res, -frobenius(system.matrices[0], U))
    if any(res) or w.objective != out.value:
        raise ArithmeticError("dual witness does not reproduce the LP solution")
    return DualResult(OPTIMAL, level, out.value, w, len(atoms))


def weak_duality_holds(system: CopSystem, cost, x, witness: CPWitness) -> bool:
    """-A_0.U <= c'x for a feasible x and a feasible CP witness U."""
    cx = sum((Fraction(c) * v for c, v in zip(cost, x)), Fraction(0))
    return witness.objective <= cx


def duality_gap(system: CopSystem, cost: Sequence, config: SIPConfig = SIPConfig(),
                max_level: int = 3, pool: Optional[CutPool] = None) -> GapReport:
    cost = tuple(Fraction(c) for c in cost)
    primal = solve_primal(system, cost, config, pool)
    report = GapReport(cost, primal, None, certified_dual=certified_dual_value(system, cost))
    prev = None
    for level in range(1, max_level + 1):
        d = solve_dual_discretized(system, cost, level)
        report.levels.append(d)
        if d.status != OPTIMAL:
            continue
        if report.dual is not None and report.dual.status == OPTIMAL and d.value < report.dual.value:
            raise ArithmeticError("discretized dual value decreased on a finer grid")
        report.dual = d
        if primal.status == OPTIMAL:
            if not weak_duality_holds(system, cost, primal.x, d.witness):
                raise ArithmeticError("weak duality violated")
            report.weak_duality_checked += 1
        if prev is not None and abs(float(d.value) - float(prev)) <= STABLE_TOL:
            if report.certified_dual is None or d.value == report.certified_dual:
                report.stabilized = True
                break
        prev = d.value
    if report.dual is None and report.levels:
        report.dual = report.levels[-1]
    if report.certified_dual is not None and report.dual is not None and report.dual.status == OPTIMAL:
        if report.dual.value > report.certified_dual:
            raise ArithmeticError("discretized dual exceeds the certified dual value")
    if primal.status == OPTIMAL:
        if report.certified_dual is not None:
            if report.certified_dual > primal.value:
                raise ArithmeticError("certified dual value exceeds the primal value")
            report.gap = primal.value - report.certified_dual
            report.gap_kind = "exact"
        elif report.dual is not None and report.dual.status == OPTIMAL:
            report.gap = primal.value - report.dual.value
            report.gap_kind = "exact" if report.gap == 0 else "upper-bound"
    return report
