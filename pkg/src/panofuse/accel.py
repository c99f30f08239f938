"""Kernel backend selection.

The hot inner loops (densification, depth-map fills, scatter projection and
the seam min-cut) have two interchangeable implementations: a numba-compiled
one and the plain NumPy/Python one the compiled version is built from.
The environment variable PANOFUSE_NUMBA picks the backend at import time:

    PANOFUSE_NUMBA=1     force numba (error if unavailable)
    PANOFUSE_NUMBA=0     force the pure NumPy/Python path
    PANOFUSE_NUMBA=auto  use numba when importable (default)

``set_enabled`` flips the backend at runtime; the benchmark suite uses it to
time both paths in one process.
"""

from __future__ import annotations

import functools
import os

try:
    import numba
    from numba import prange

    _HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None
    prange = range
    _HAVE_NUMBA = False


def numba_available() -> bool:
    return _HAVE_NUMBA


def _initial_state() -> bool:
    raw = os.environ.get("PANOFUSE_NUMBA", "auto").strip().lower()
    if raw in ("1", "true", "on", "yes"):
        if not _HAVE_NUMBA:
            raise ImportError("PANOFUSE_NUMBA=1 but numba is not importable")
        return True
    if raw in ("0", "false", "off", "no"):
        return False
    return _HAVE_NUMBA


_enabled = _initial_state()


def enabled() -> bool:
    return _enabled


def set_enabled(value: bool) -> None:
    global _enabled
    if value and not _HAVE_NUMBA:
        raise ImportError("numba backend requested but numba is not importable")
    _enabled = bool(value)


def dual(*, parallel: bool = False):
    """Decorator producing a function that dispatches to the jitted or the
    plain implementation depending on the current backend.

    The wrapped function keeps the original at ``.py_func`` and the compiled
    version at ``.jit_func`` so the benchmark can time each directly.
    """

    def wrap(func):
        jitted = None
        if _HAVE_NUMBA:
            jitted = numba.njit(cache=True, parallel=parallel)(func)

        @functools.wraps(func)
        def dispatch(*args):
            if _enabled and jitted is not None:
                return jitted(*args)
            return func(*args)

        dispatch.py_func = func
        dispatch.jit_func = jitted
        return dispatch

    return wrap
