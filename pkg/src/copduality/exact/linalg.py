"""Exact linear algebra over the rationals.

Matrices are plain sequences of rows whose entries are anything
``fractions.Fraction`` accepts. Nothing here ever rounds.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd, lcm
from typing import Optional, Sequence

Matrix = Sequence[Sequence[Fraction]]
Vector = Sequence[Fraction]


def as_fraction_matrix(rows) -> list[list[Fraction]]:
    return [[Fraction(v) for v in row] for row in rows]


def _integer_rows(rows: Matrix) -> list[list[int]]:
    """Scale every row by the lcm of its denominators (row space unchanged)."""
    out = []
    for row in rows:
        fr = [Fraction(v) for v in row]
        den = 1
        for v in fr:
            den = lcm(den, v.denominator)
        out.append([int(v * den) for v in fr])
    return out


def rank(rows: Matrix) -> int:
    """Exact rank via fraction-free (Bareiss) elimination on integer rows."""
    a = _integer_rows(rows)
    if not a or not a[0]:
        return 0
    m, n = len(a), len(a[0])
    r = 0
    prev = 1
    for c in range(n):
        piv = next((i for i in range(r, m) if a[i][c] != 0), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        p = a[r][c]
        for i in range(r + 1, m):
            f = a[i][c]
            row_i = a[i]
            row_r = a[r]
            for j in range(c + 1, n):
                # Bareiss step: the division is exact
                row_i[j] = (p * row_i[j] - f * row_r[j]) // prev
            row_i[c] = 0
        prev = p
        r += 1
        if r == m:
            break
    return r


def transpose(rows: Matrix) -> list[list[Fraction]]:
    if not rows:
        return []
    return [list(col) for col in zip(*rows)]


def rref(rows: Matrix) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form and pivot columns."""
    a = as_fraction_matrix(rows)
    if not a:
        return a, []
    m, n = len(a), len(a[0])
    pivots: list[int] = []
    r = 0
    for c in range(n):
        piv = next((i for i in range(r, m) if a[i][c] != 0), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        p = a[r][c]
        if p != 1:
            a[r] = [v / p for v in a[r]]
        row_r = a[r]
        nz = [j for j in range(n) if row_r[j] != 0]
        for i in range(m):
            if i != r and a[i][c] != 0:
                f = a[i][c]
                row_i = a[i]
                for j in nz:
                    row_i[j] -= f * row_r[j]
        pivots.append(c)
        r += 1
        if r == m:
            break
    return a, pivots


@dataclass(frozen=True)
class LinearSolution:
    """Solution set ``particular + span(nullspace)`` of ``A x = b``."""

    particular: tuple[Fraction, ...]
    nullspace: tuple[tuple[Fraction, ...], ...]

    @property
    def dimension(self) -> int:
        return len(self.nullspace)

    def point(self, coeffs: Sequence[Fraction]) -> list[Fraction]:
        x = list(self.particular)
        for c, v in zip(coeffs, self.nullspace):
            if c:
                for i, vi in enumerate(v):
                    x[i] += c * vi
        return x


def solve_linear(A: Matrix, b: Vector, ncols: Optional[int] = None) -> Optional[LinearSolution]:
    """Parametric exact solution of ``A x = b``; ``None`` when inconsistent.

    ``ncols`` is needed only when ``A`` has no rows.
    """
    if len(A) != len(b):
        raise ValueError(f"A has {len(A)} rows but b has {len(b)} entries")
    n = ncols if ncols is not None else (len(A[0]) if A else 0)
    if not A:
        zero = tuple(Fraction(0) for _ in range(n))
        basis = tuple(tuple(Fraction(int(i == j)) for i in range(n)) for j in range(n))
        return LinearSolution(zero, basis)
    aug = [list(row) + [bi] for row, bi in zip(A, b)]
    red, pivots = rref(aug)
    if n in pivots:
        return None
    x = [Fraction(0)] * n
    for r, c in enumerate(pivots):
        x[c] = red[r][n]
    free = [c for c in range(n) if c not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * n
        v[f] = Fraction(1)
        for r, c in enumerate(pivots):
            v[c] = -red[r][f]
        basis.append(tuple(v))
    return LinearSolution(tuple(x), tuple(basis))


def nullspace(A: Matrix, ncols: Optional[int] = None) -> list[tuple[Fraction, ...]]:
    n = ncols if ncols is not None else (len(A[0]) if A else 0)
    sol = solve_linear(A, [Fraction(0)] * len(A), ncols=n)
    assert sol is not None
    return list(sol.nullspace)


def matvec(A: Matrix, x: Vector) -> list[Fraction]:
    return [sum((a * xi for a, xi in zip(row, x)), Fraction(0)) for row in A]


def dot(u: Vector, v: Vector) -> Fraction:
    return sum((a * b for a, b in zip(u, v)), Fraction(0))


def orthogonal_basis(vectors: Sequence[Vector]) -> list[list[Fraction]]:
    """Gram-Schmidt without normalisation, so everything stays rational."""
    basis: list[list[Fraction]] = []
    for v in vectors:
        w = [Fraction(x) for x in v]
        for u in basis:
            c = dot(w, u) / dot(u, u)
            if c:
                w = [wi - c * ui for wi, ui in zip(w, u)]
        if any(w):
            basis.append(w)
    return basis


def project_onto_complement(v: Vector, basis: Sequence[Vector]) -> list[Fraction]:
    """Orthogonal projection of ``v`` onto the complement of span(basis).

    ``basis`` must be pairwise orthogonal (see :func:`orthogonal_basis`).
    """
    w = [Fraction(x) for x in v]
    for u in basis:
        c = dot(w, u) / dot(u, u)
        if c:
            w = [wi - c * ui for wi, ui in zip(w, u)]
    return w


def common_denominator(values) -> int:
    d = 1
    for v in values:
        d = lcm(d, Fraction(v).denominator)
    return d


def primitive_integer_vector(v: Vector) -> list[int]:
    """Smallest integer multiple of ``v`` pointing the same way."""
    d = common_denominator(v)
    ints = [int(Fraction(x) * d) for x in v]
    g = 0
    for x in ints:
        g = gcd(g, x)
    return [x // g for x in ints] if g else ints
