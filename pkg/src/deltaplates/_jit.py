"""Numba switch.

Set ``DELTAPLATES_DISABLE_JIT=1`` to run every kernel through its pure
numpy implementation. Numba is optional; without it the numpy path is
used unconditionally.
"""
import functools
import os

try:
    import numba
except ImportError:  # pragma: no cover - numba is installed in CI
    numba = None

_FALSY = {"", "0", "false", "no", "off"}

HAVE_NUMBA = numba is not None
JIT_DISABLED = os.environ.get("DELTAPLATES_DISABLE_JIT", "0").strip().lower() not in _FALSY
USE_JIT = HAVE_NUMBA and not JIT_DISABLED


def njit(func=None, **kwargs):
    """``numba.njit`` with the package defaults, or ``None`` if numba is
    unavailable.

    Unlike the public switch, this always compiles when numba exists, so
    tests and benchmarks can compare both paths in one process.
    """
    if func is None:
        return functools.partial(njit, **kwargs)
    if not HAVE_NUMBA:
        return None
    opts = {"cache": True, "nogil": True}
    opts.update(kwargs)
    return numba.njit(**opts)(func)


def backend() -> str:
    return "numba" if USE_JIT else "numpy"
