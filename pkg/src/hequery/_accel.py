"""Kernel backend selection.

Hot mod-p polynomial loops are compiled with numba when it is importable.
Set ``HEQUERY_DISABLE_NUMBA=1`` to force the pure-numpy implementations.
"""
import os

_DISABLED = os.environ.get("HEQUERY_DISABLE_NUMBA", "").strip().lower() in ("1", "true", "yes", "on")

try:
    if _DISABLED:
        raise ImportError("numba disabled by HEQUERY_DISABLE_NUMBA")
    from numba import njit as _njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - depends on environment
    _njit = None
    HAVE_NUMBA = False

USE_NUMBA = HAVE_NUMBA


def njit(fn):
    """``numba.njit(cache=True)`` when available, else return ``fn`` untouched."""
    if _njit is None:
        return fn
    return _njit(cache=True)(fn)


def backend_name():
    return "numba" if USE_NUMBA else "numpy"
