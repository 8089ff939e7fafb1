"""Numba switch.

Kernels are written once in the numba-compatible subset of Python. When numba
is importable and ``PMWNET_DISABLE_NUMBA`` is unset (or ``0``), they are
compiled with ``@njit``; otherwise the plain Python/numpy function is used.
The original function stays reachable as ``kernel.py_func`` either way so the
benchmark can compare both paths inside one process.
"""

from __future__ import annotations

import os

_FLAG = os.environ.get("PMWNET_DISABLE_NUMBA", "").strip().lower()

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None

NUMBA_ENABLED = numba is not None and _FLAG in ("", "0", "false", "no")


def njit(func=None, **options):
    options.setdefault("cache", True)
    options.setdefault("nogil", True)

    def wrap(f):
        if NUMBA_ENABLED:
            return numba.njit(**options)(f)
        f.py_func = f
        return f

    if func is not None:
        return wrap(func)
    return wrap


def backend() -> str:
    return f"numba-{numba.__version__}" if NUMBA_ENABLED else "python"
