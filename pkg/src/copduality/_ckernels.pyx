# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled grid kernels; same semantics and visiting order as ``_kernels_py``."""
import numpy as np
cimport numpy as cnp

cnp.import_array()

ctypedef long long i64


cdef inline bint _next_comp(i64[::1] u, int p):
    cdef int i = p - 2
    cdef i64 rest
    while i >= 0 and u[i] == 0:
        i -= 1
    if i < 0:
        return False
    rest = u[p - 1]
    u[p - 1] = 0
    u[i] -= 1
    u[i + 1] = rest + 1
    return True


def grid_min_int(D, int denom):
    cdef cnp.ndarray[i64, ndim=2, mode="c"] Da = np.ascontiguousarray(np.asarray(D, dtype=np.int64))
    cdef i64[:, ::1] Dv = Da
    cdef int p = Dv.shape[0]
    cdef cnp.ndarray[i64, ndim=1, mode="c"] ua = np.zeros(p, dtype=np.int64)
    cdef i64[::1] u = ua
    cdef cnp.ndarray[i64, ndim=1, mode="c"] besta = np.zeros(p, dtype=np.int64)
    cdef i64 v, acc, best = 0
    cdef bint first = True
    cdef int i, j
    u[0] = denom
    while True:
        v = 0
        for i in range(p):
            if u[i]:
                acc = 0
                for j in range(p):
                    if u[j]:
                        acc += Dv[i, j] * u[j]
                v += u[i] * acc
        if first or v < best:
            best = v
            besta[:] = ua
            first = False
        if not _next_comp(u, p):
            break
    return int(best), tuple(besta.tolist())


def grid_min_float(D, int denom):
    cdef cnp.ndarray[double, ndim=2, mode="c"] Da = np.ascontiguousarray(np.asarray(D, dtype=np.float64))
    cdef double[:, ::1] Dv = Da
    cdef int p = Dv.shape[0]
    cdef cnp.ndarray[i64, ndim=1, mode="c"] ua = np.zeros(p, dtype=np.int64)
    cdef i64[::1] u = ua
    cdef cnp.ndarray[i64, ndim=1, mode="c"] besta = np.zeros(p, dtype=np.int64)
    cdef double v, acc, best = 0.0
    cdef bint first = True
    cdef int i, j
    u[0] = denom
    while True:
        v = 0.0
        for i in range(p):
            if u[i]:
                acc = 0.0
                for j in range(p):
                    if u[j]:
                        acc += Dv[i, j] * u[j]
                v += u[i] * acc
        if first or v < best:
            best = v
            besta[:] = ua
            first = False
        if not _next_comp(u, p):
            break
    return best / (<double>denom * denom), tuple(besta.tolist())


def quad_batch_int(points, mats):
    cdef cnp.ndarray[i64, ndim=2, mode="c"] P = np.ascontiguousarray(np.asarray(points, dtype=np.int64))
    cdef cnp.ndarray[i64, ndim=3, mode="c"] M = np.ascontiguousarray(np.asarray(mats, dtype=np.int64))
    cdef i64[:, ::1] Pv = P
    cdef i64[:, :, ::1] Mv = M
    cdef Py_ssize_t npts = Pv.shape[0], nm = Mv.shape[0], p = Mv.shape[1]
    cdef cnp.ndarray[i64, ndim=2, mode="c"] out = np.zeros((npts, nm), dtype=np.int64)
    cdef i64[:, ::1] ov = out
    cdef Py_ssize_t r, m, i, j
    cdef i64 acc, v
    for r in range(npts):
        for m in range(nm):
            v = 0
            for i in range(p):
                if Pv[r, i]:
                    acc = 0
                    for j in range(p):
                        acc += Mv[m, i, j] * Pv[r, j]
                    v += Pv[r, i] * acc
            ov[r, m] = v
    return out.tolist()
