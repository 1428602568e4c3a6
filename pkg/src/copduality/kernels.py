"""Grid kernels with a compiled backend and a pure-Python fallback.

The compiled module is used when it imports and ``COPDUALITY_PURE_PYTHON``
is unset. Integer kernels fall back to Python whenever int64 could
overflow, so results never depend on the backend.
"""
from __future__ import annotations

import os

from . import _kernels_py

compositions = _kernels_py.compositions

_INT64_SAFE = 1 << 62

try:
    if os.environ.get("COPDUALITY_PURE_PYTHON"):
        raise ImportError("pure Python requested")
    from . import _ckernels as _impl
    KERNEL_BACKEND = "cython"
except ImportError:
    _impl = _kernels_py
    KERNEL_BACKEND = "python"


def _max_abs(rows):
    return max((abs(int(v)) for row in rows for v in row), default=0)


def grid_min_int(D, denom: int):
    """(min u'Du, argmin u) over compositions u of ``denom``; D integer."""
    if _max_abs(D) * denom * denom * len(D) >= _INT64_SAFE:
        return _kernels_py.grid_min_int(D, denom)
    return _impl.grid_min_int(D, denom)


def grid_min_float(D, denom: int):
    """Float screening: (min t'Dt, argmin u) with t = u / denom."""
    return _impl.grid_min_float(D, denom)


def quad_batch_int(points, mats):
    if not points or not mats:
        return [[] for _ in points]
    scale = max((sum(abs(int(v)) for v in u) for u in points), default=0)
    if max(_max_abs(M) for M in mats) * scale * scale * len(mats[0]) >= _INT64_SAFE:
        return _kernels_py.quad_batch_int(points, mats)
    return _impl.quad_batch_int(points, mats)


def backend_info() -> dict:
    return {"backend": KERNEL_BACKEND}
