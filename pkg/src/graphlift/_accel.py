"""Kernel compilation switch.

Hot loops are written once in numba-compatible Python.  When numba is
available and ``GRAPHLIFT_DISABLE_NUMBA`` is unset (or ``0``), they are
compiled with ``@njit``; otherwise the plain Python/numpy path runs.
"""

import os

_flag = os.environ.get("GRAPHLIFT_DISABLE_NUMBA", "0").strip().lower()

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None

NUMBA_ENABLED = numba is not None and _flag in ("", "0", "false", "no")


def kernel(fn):
    """Compile ``fn`` with numba when enabled, else return it unchanged."""
    if NUMBA_ENABLED:
        return numba.njit(cache=True, nogil=True)(fn)
    return fn


def python_impl(fn):
    """The uncompiled Python function behind a (possibly) jitted kernel."""
    return getattr(fn, "py_func", fn)
