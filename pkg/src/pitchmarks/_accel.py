"""Optional numba acceleration for the hot kernels.

Every accelerated kernel in this package is written as a plain-loop python
function that numba can compile unchanged.  When numba is installed and the
``PITCHMARKS_NO_NUMBA`` environment variable is unset (or falsy), kernels are
compiled with ``@njit``; otherwise the pure python/numpy fallback paths run.
Both paths produce bit-identical results (pinned by tests), so the flag only
trades speed.
"""

import os

try:
    import numba
except ImportError:  # pragma: no cover - exercised only without numba
    numba = None

ENV_FLAG = "PITCHMARKS_NO_NUMBA"


def _flag_disabled() -> bool:
    return os.environ.get(ENV_FLAG, "").strip().lower() in ("1", "true", "yes", "on")


#: True when kernels are compiled.  Resolved once at import time.
NUMBA_ENABLED = numba is not None and not _flag_disabled()


def jit_kernel(func):
    """Compile ``func`` with numba when acceleration is on, else return it as-is."""
    if NUMBA_ENABLED:
        return numba.njit(cache=True, nogil=True)(func)
    return func
