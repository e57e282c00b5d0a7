"""Numba acceleration toggle.

Hot kernels (EMD network simplex, LDA Gibbs sweeps, skip-gram training)
are written as nopython-compatible functions and compiled with numba when
available. Set CODEMATCH_NO_NUMBA=1 to force the pure-Python/numpy path;
both paths compute bit-identical results (same operation order, own
integer RNG instead of library RNG).
"""

import os

_DISABLED = os.environ.get("CODEMATCH_NO_NUMBA", "").strip().lower() in (
    "1", "true", "yes", "on",
)

try:
    import numba as _numba
except ImportError:  # pragma: no cover - numba is an optional extra
    _numba = None

NUMBA_ENABLED = _numba is not None and not _DISABLED


def jit_kernel(func=None, *, nogil=False):
    """Compile ``func`` with numba.njit when acceleration is on, else
    return it unchanged."""
    def wrap(f):
        if NUMBA_ENABLED:
            return _numba.njit(cache=True, nogil=nogil)(f)
        return f

    if func is None:
        return wrap
    return wrap(func)


def backend_name():
    return "numba" if NUMBA_ENABLED else "python"
