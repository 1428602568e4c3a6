"""Pure-Python versions of the grid kernels (reference and fallback).

Grid points are compositions u of ``denom`` into ``p`` nonnegative parts,
visited in lexicographically descending order; t = u / denom.
"""
from __future__ import annotations


def compositions(p: int, denom: int):
    u = [0] * p
    u[0] = denom
    while True:
        yield tuple(u)
        i = p - 2
        while i >= 0 and u[i] == 0:
            i -= 1
        if i < 0:
            return
        rest = u[p - 1]
        u[p - 1] = 0
        u[i] -= 1
        u[i + 1] = rest + 1


def _quad_int(D, u, p):
    total = 0
    for i in range(p):
        ui = u[i]
        if ui:
            row = D[i]
            acc = 0
            for j in range(p):
                if u[j]:
                    acc += row[j] * u[j]
            total += ui * acc
    return total


def grid_min_int(D, denom: int):
    """Exact min of u'Du over compositions of ``denom`` (integer D)."""
    p = len(D)
    D = [[int(v) for v in row] for row in D]
    best = None
    arg = None
    for u in compositions(p, denom):
        v = _quad_int(D, u, p)
        if best is None or v < best:
            best, arg = v, u
    return best, arg


def grid_min_float(D, denom: int):
    p = len(D)
    D = [[float(v) for v in row] for row in D]
    best = None
    arg = None
    for u in compositions(p, denom):
        v = 0.0
        for i in range(p):
            if u[i]:
                acc = 0.0
                for j in range(p):
                    if u[j]:
                        acc += D[i][j] * u[j]
                v += u[i] * acc
        if best is None or v < best:
            best, arg = v, u
    return best / (denom * denom), arg


def quad_batch_int(points, mats):
    """values[i][m] = points[i]' mats[m] points[i] for integer data."""
    p = len(mats[0]) if mats else 0
    mats = [[[int(v) for v in row] for row in M] for M in mats]
    out = []
    for u in points:
        u = [int(v) for v in u]
        out.append([_quad_int(M, u, p) for M in mats])
    return out
