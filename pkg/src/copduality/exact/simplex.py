"""Exact two-phase simplex over ``fractions.Fraction`` with Bland's rule.

Every outcome carries a certificate that can be re-checked with
:func:`verify_outcome` using nothing but rational arithmetic:

* optimal    -> primal point, row multipliers (duals) and reduced costs
* infeasible -> Farkas multipliers ``y`` over the rows
* unbounded  -> feasible point plus an improving ray
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

LE, GE, EQ = "<=", ">=", "=="
_ZERO = Fraction(0)
_ONE = Fraction(1)


@dataclass(frozen=True)
class LPInstance:
    """``min/max c.x + c0`` s.t. ``rows[i].x (sense) rhs[i]``, ``lower <= x <= upper``.

    ``None`` in ``lower``/``upper`` means infinite. Default bounds are ``x >= 0``.
    """

    objective: tuple[Fraction, ...]
    rows: tuple[tuple[Fraction, ...], ...] = ()
    senses: tuple[str, ...] = ()
    rhs: tuple[Fraction, ...] = ()
    lower: Optional[tuple[Optional[Fraction], ...]] = None
    upper: Optional[tuple[Optional[Fraction], ...]] = None
    maximize: bool = False
    constant: Fraction = _ZERO

    def __post_init__(self):
        n = len(self.objective)
        object.__setattr__(self, "objective", tuple(Fraction(v) for v in self.objective))
        object.__setattr__(self, "rows", tuple(tuple(Fraction(v) for v in r) for r in self.rows))
        object.__setattr__(self, "rhs", tuple(Fraction(v) for v in self.rhs))
        object.__setattr__(self, "constant", Fraction(self.constant))
        if self.lower is None:
            object.__setattr__(self, "lower", tuple(_ZERO for _ in range(n)))
        else:
            object.__setattr__(self, "lower", tuple(None if v is None else Fraction(v) for v in self.lower))
        if self.upper is None:
            object.__setattr__(self, "upper", tuple(None for _ in range(n)))
        else:
            object.__setattr__(self, "upper", tuple(None if v is None else Fraction(v) for v in self.upper))
        if not (len(self.rows) == len(self.senses) == len(self.rhs)):
            raise ValueError("rows, senses and rhs must have equal length")
        if any(len(r) != n for r in self.rows):
            raise ValueError("every constraint row must have one entry per variable")
        if len(self.lower) != n or len(self.upper) != n:
            raise ValueError("bounds must have one entry per variable")
        for s in self.senses:
            if s not in (LE, GE, EQ):
                raise ValueError(f"unknown constraint sense {s!r}")

    @property
    def nvars(self) -> int:
        return len(self.objective)

    def value_at(self, x: Sequence[Fraction]) -> Fraction:
        return self.constant + sum((c * v for c, v in zip(self.objective, x)), _ZERO)


@dataclass(frozen=True)
class LPOutcome:
    status: str  # "optimal" | "infeasible" | "unbounded"
    x: Optional[tuple[Fraction, ...]] = None
    value: Optional[Fraction] = None
    duals: Optional[tuple[Fraction, ...]] = None
    reduced_costs: Optional[tuple[Fraction, ...]] = None
    ray: Optional[tuple[Fraction, ...]] = None
    farkas: Optional[tuple[Fraction, ...]] = None
    pivots: int = 0

    @property
    def optimal(self) -> bool:
        return self.status == "optimal"


@dataclass
class _Standard:
    """Bookkeeping for the map original variables -> nonnegative columns."""

    # per original variable: list of (column, sign); x_j = offset_j + sum sign*y_col
    terms: list[list[tuple[int, int]]] = field(default_factory=list)
    offset: list[Fraction] = field(default_factory=list)
    ncols: int = 0


def _standardize(lp: LPInstance):
    std = _Standard()
    bound_rows: list[tuple[int, Fraction]] = []  # (column, upper limit)
    for j in range(lp.nvars):
        lo, up = lp.lower[j], lp.upper[j]
        if lo is not None:
            col = std.ncols
            std.ncols += 1
            std.terms.append([(col, 1)])
            std.offset.append(lo)
            if up is not None:
                if up < lo:
                    raise ValueError(f"variable {j} has empty bounds [{lo}, {up}]")
                bound_rows.append((col, up - lo))
        elif up is not None:
            col = std.ncols
            std.ncols += 1
            std.terms.append([(col, -1)])
            std.offset.append(up)
        else:
            std.terms.append([(std.ncols, 1), (std.ncols + 1, -1)])
            std.offset.append(_ZERO)
            std.ncols += 2

    rows: list[list[Fraction]] = []
    senses: list[str] = []
    rhs: list[Fraction] = []
    for row, sense, b in zip(lp.rows, lp.senses, lp.rhs):
        r = [_ZERO] * std.ncols
        shift = b
        for j, a in enumerate(row):
            if a:
                shift -= a * std.offset[j]
                for col, sgn in std.terms[j]:
                    r[col] += a * sgn
        rows.append(r)
        senses.append(sense)
        rhs.append(shift)
    for col, lim in bound_rows:
        r = [_ZERO] * std.ncols
        r[col] = _ONE
        rows.append(r)
        senses.append(LE)
        rhs.append(lim)

    cost = [_ZERO] * std.ncols
    sign = -1 if lp.maximize else 1
    for j, c in enumerate(lp.objective):
        if c:
            for col, sgn in std.terms[j]:
                cost[col] += sign * c * sgn
    return std, rows, senses, rhs, cost


class _Tableau:
    def __init__(self, rows, senses, rhs, ncols):
        m = len(rows)
        self.m = m
        self.nstruct = ncols
        # slack/surplus columns, then artificials
        slack_cols = []
        col = ncols
        self.flipped = [False] * m
        for s in senses:
            if s == EQ:
                slack_cols.append(None)
            else:
                slack_cols.append(col)
                col += 1
        self.nslack_end = col
        self.init_col = [0] * m
        self.artificial = set()
        art_rows = []
        for i in range(m):
            if rhs[i] < 0:
                self.flipped[i] = True
            sc = slack_cols[i]
            slack_sign = 0
            if sc is not None:
                slack_sign = 1 if senses[i] == LE else -1
                if self.flipped[i]:
                    slack_sign = -slack_sign
            if sc is not None and slack_sign == 1:
                self.init_col[i] = sc
            else:
                self.init_col[i] = col
                self.artificial.add(col)
                art_rows.append(i)
                col += 1
        self.ncols = col
        self.T: list[list[Fraction]] = []
        self.b: list[Fraction] = []
        for i in range(m):
            r = [_ZERO] * col
            sgn = -1 if self.flipped[i] else 1
            for j, v in enumerate(rows[i]):
                if v:
                    r[j] = sgn * v
            sc = slack_cols[i]
            if sc is not None:
                r[sc] = Fraction(sgn * (1 if senses[i] == LE else -1))
            ic = self.init_col[i]
            r[ic] = _ONE
            self.T.append(r)
            self.b.append(sgn * rhs[i])
        self.basis = list(self.init_col)
        self.pivots = 0

    def pivot(self, pr: int, pc: int, obj: list[Fraction], obj_val: list[Fraction]):
        T = self.T
        prow = T[pr]
        p = prow[pc]
        if p != 1:
            inv = 1 / p
            for j in range(self.ncols):
                if prow[j]:
                    prow[j] *= inv
            self.b[pr] *= inv
        nz = [j for j in range(self.ncols) if prow[j]]
        bp = self.b[pr]
        for i in range(self.m):
            if i == pr:
                continue
            row = T[i]
            f = row[pc]
            if f:
                for j in nz:
                    row[j] -= f * prow[j]
                self.b[i] -= f * bp
        f = obj[pc]
        if f:
            for j in nz:
                obj[j] -= f * prow[j]
            obj_val[0] += f * bp
        self.basis[pr] = pc
        self.pivots += 1

    def reduced_row(self, cost: Sequence[Fraction]):
        """Reduced costs ``c - c_B B^-1 A`` and the current objective value."""
        d = list(cost)
        val = _ZERO
        for i, bc in enumerate(self.basis):
            cb = cost[bc]
            if cb:
                row = self.T[i]
                for j in range(self.ncols):
                    if row[j]:
                        d[j] -= cb * row[j]
                val += cb * self.b[i]
        return d, [val]

    def run(self, d, val, allowed) -> Optional[int]:
        """Bland-rule minimisation; returns the entering column if unbounded."""
        T = self.T
        while True:
            pc = next((j for j in range(self.ncols) if allowed[j] and d[j] < 0), None)
            if pc is None:
                return None
            best = None
            for i in range(self.m):
                a = T[i][pc]
                if a > 0:
                    ratio = self.b[i] / a
                    key = (ratio, self.basis[i])
                    if best is None or key < best[0]:
                        best = (key, i)
            if best is None:
                return pc
            self.pivot(best[1], pc, d, val)


def solve_lp(lp: LPInstance) -> LPOutcome:
    """Solve ``lp`` exactly. Never raises for infeasible/unbounded problems."""
    std, rows, senses, rhs, cost = _standardize(lp)
    tab = _Tableau(rows, senses, rhs, std.ncols)
    m = tab.m
    nrow_orig = len(lp.rows)

    # phase 1
    cost1 = [_ZERO] * tab.ncols
    for c in tab.artificial:
        cost1[c] = _ONE
    if tab.artificial:
        d1, v1 = tab.reduced_row(cost1)
        allowed = [True] * tab.ncols
        tab.run(d1, v1, allowed)
        if v1[0] > 0:
            y_std = [cost1[tab.init_col[i]] - d1[tab.init_col[i]] for i in range(m)]
            y = _unflip(y_std, tab.flipped)[:nrow_orig]
            # multipliers on the bound rows are absorbed by the box in verification
            return LPOutcome("infeasible", farkas=tuple(-v for v in y), pivots=tab.pivots)
        # drive zero-level artificials out of the basis
        for i in range(m):
            if tab.basis[i] in tab.artificial:
                pc = next((j for j in range(tab.nslack_end) if tab.T[i][j] != 0), None)
                if pc is not None:
                    tab.pivot(i, pc, d1, v1)

    cost2 = [_ZERO] * tab.ncols
    for j, c in enumerate(cost):
        cost2[j] = c
    d2, v2 = tab.reduced_row(cost2)
    allowed = [j not in tab.artificial for j in range(tab.ncols)]
    enter = tab.run(d2, v2, allowed)

    y_std = [cost2[tab.init_col[i]] - d2[tab.init_col[i]] for i in range(m)]
    xs = [_ZERO] * tab.ncols
    for i, bc in enumerate(tab.basis):
        xs[bc] = tab.b[i]
    x = _recover(std, xs)

    if enter is not None:
        dy = [_ZERO] * tab.ncols
        dy[enter] = _ONE
        for i, bc in enumerate(tab.basis):
            dy[bc] = -tab.T[i][enter]
        ray = _recover_direction(std, dy)
        return LPOutcome("unbounded", x=tuple(x), value=lp.value_at(x), ray=tuple(ray), pivots=tab.pivots)

    y = _unflip(y_std, tab.flipped)[:nrow_orig]
    if lp.maximize:
        y = [-v for v in y]
    red = []
    for j in range(lp.nvars):
        r = lp.objective[j]
        for i in range(nrow_orig):
            if y[i] and lp.rows[i][j]:
                r -= y[i] * lp.rows[i][j]
        red.append(r)
    return LPOutcome(
        "optimal",
        x=tuple(x),
        value=lp.value_at(x),
        duals=tuple(y),
        reduced_costs=tuple(red),
        pivots=tab.pivots,
    )


def _unflip(y, flipped):
    return [-v if f else v for v, f in zip(y, flipped)]


def _recover(std: _Standard, ys) -> list[Fraction]:
    x = []
    for terms, off in zip(std.terms, std.offset):
        v = off
        for col, sgn in terms:
            v += sgn * ys[col]
        x.append(v)
    return x


def _recover_direction(std: _Standard, dy) -> list[Fraction]:
    d = []
    for terms in std.terms:
        v = _ZERO
        for col, sgn in terms:
            v += sgn * dy[col]
        d.append(v)
    return d


# ---------------------------------------------------------------------------
# certificate checking


def _row_activity(lp: LPInstance, x) -> list[Fraction]:
    return [sum((a * v for a, v in zip(row, x) if a), _ZERO) for row in lp.rows]


def is_feasible(lp: LPInstance, x) -> bool:
    for j, v in enumerate(x):
        if lp.lower[j] is not None and v < lp.lower[j]:
            return False
        if lp.upper[j] is not None and v > lp.upper[j]:
            return False
    for act, s, b in zip(_row_activity(lp, x), lp.senses, lp.rhs):
        if (s == LE and act > b) or (s == GE and act < b) or (s == EQ and act != b):
            return False
    return True


def verify_outcome(lp: LPInstance, out: LPOutcome) -> bool:
    """Re-check the certificate attached to ``out`` with exact arithmetic."""
    if out.status == "optimal":
        return _verify_optimal(lp, out)
    if out.status == "infeasible":
        return _verify_farkas(lp, out.farkas)
    if out.status == "unbounded":
        return _verify_ray(lp, out)
    return False


def _verify_optimal(lp: LPInstance, out: LPOutcome) -> bool:
    x, y = out.x, out.duals
    if not is_feasible(lp, x) or out.value != lp.value_at(x):
        return False
    # write everything in the minimisation convention
    s = -1 if lp.maximize else 1
    act = _row_activity(lp, x)
    for yi, sense, a, b in zip(y, lp.senses, act, lp.rhs):
        ym = s * yi
        if sense == GE and ym < 0:
            return False
        if sense == LE and ym > 0:
            return False
        if ym * (a - b) != 0:
            return False
    for j in range(lp.nvars):
        r = lp.objective[j] - sum((yi * lp.rows[i][j] for i, yi in enumerate(y)), _ZERO)
        if r != out.reduced_costs[j]:
            return False
        rm = s * r
        lo, up = lp.lower[j], lp.upper[j]
        at_lo = lo is not None and x[j] == lo
        at_up = up is not None and x[j] == up
        if at_lo and at_up:
            continue
        if at_lo and rm < 0:
            return False
        if at_up and rm > 0:
            return False
        if not at_lo and not at_up and rm != 0:
            return False
    return True


def _verify_farkas(lp: LPInstance, y) -> bool:
    """``y`` combines rows into ``g.x <= h`` valid on the feasible set; the
    box must make ``g.x`` strictly exceed ``h`` everywhere."""
    if y is None or len(y) != len(lp.rows):
        return False
    for yi, sense in zip(y, lp.senses):
        if sense == LE and yi < 0:
            return False
        if sense == GE and yi > 0:
            return False
    g = [sum((yi * lp.rows[i][j] for i, yi in enumerate(y)), _ZERO) for j in range(lp.nvars)]
    h = sum((yi * b for yi, b in zip(y, lp.rhs)), _ZERO)
    # minimum of g.x over the box
    low = _ZERO
    for j, gj in enumerate(g):
        if gj > 0:
            if lp.lower[j] is None:
                return False
            low += gj * lp.lower[j]
        elif gj < 0:
            if lp.upper[j] is None:
                return False
            low += gj * lp.upper[j]
    return low > h


def _verify_ray(lp: LPInstance, out: LPOutcome) -> bool:
    if out.x is None or out.ray is None or not is_feasible(lp, out.x):
        return False
    d = out.ray
    for j, dj in enumerate(d):
        if lp.lower[j] is not None and dj < 0:
            return False
        if lp.upper[j] is not None and dj > 0:
            return False
    for act, sense in zip(_row_activity(lp, d), lp.senses):
        if (sense == LE and act > 0) or (sense == GE and act < 0) or (sense == EQ and act != 0):
            return False
    gain = sum((c * v for c, v in zip(lp.objective, d)), _ZERO)
    return gain > 0 if lp.maximize else gain < 0
