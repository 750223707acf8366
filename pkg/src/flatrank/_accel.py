"""Numba switch.

Set ``FLATRANK_DISABLE_NUMBA=1`` before import to force the pure-numpy
kernels. Without numba installed the numpy kernels are used as well.
"""
import os

_FLAG = os.environ.get("FLATRANK_DISABLE_NUMBA", "").strip().lower()
DISABLED = _FLAG not in ("", "0", "false", "no")

try:
    from numba import njit as _njit
    HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    _njit = None
    HAVE_NUMBA = False

USE_NUMBA = HAVE_NUMBA and not DISABLED


def njit(func):
    """Compile ``func`` in nopython mode when numba is available, else return it unchanged."""
    if HAVE_NUMBA:
        return _njit(cache=True, nogil=True)(func)
    return func
