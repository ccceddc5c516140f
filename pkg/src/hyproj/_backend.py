"""Kernel backend selection.

Set ``HYPROJ_NO_NUMBA=1`` to force the pure-numpy kernels. The numba path is
used whenever numba imports and the flag is unset.
"""
import os

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None

NUMBA_AVAILABLE = numba is not None
NUMBA_DISABLED = os.environ.get("HYPROJ_NO_NUMBA", "").strip().lower() not in ("", "0", "false", "no")
USE_NUMBA = NUMBA_AVAILABLE and not NUMBA_DISABLED


def jit(func):
    """``numba.njit(cache=True, nogil=True)`` when numba is importable, identity otherwise.

    The jitted function is compiled regardless of ``HYPROJ_NO_NUMBA`` so the
    benchmark and the backend-agreement tests can always reach both paths.
    """
    if numba is None:
        return func
    return numba.njit(cache=True, nogil=True)(func)


def backend_name():
    return "numba" if USE_NUMBA else "numpy"


def thread_count(default=1):
    """Worker count from ``HYPROJ_THREADS``."""
    raw = os.environ.get("HYPROJ_THREADS", "").strip()
    if not raw:
        return default
    try:
        value = int(raw)
    except ValueError:
        return default
    return max(1, value)
