"""Numba toggle.

Hot kernels are written once as plain Python over float scalars and small
arrays, then compiled with numba when it is importable and not disabled via
``NRFLOW_DISABLE_NUMBA=1``. The uncompiled functions are the reference path.
"""

import os

try:
    import numba
except ImportError:  # pragma: no cover - numba is optional
    numba = None

HAVE_NUMBA = numba is not None
USE_NUMBA = HAVE_NUMBA and os.environ.get("NRFLOW_DISABLE_NUMBA", "0").lower() not in (
    "1",
    "true",
    "yes",
)


def njit(fn):
    """Compile ``fn`` with numba, or return it unchanged when numba is off."""
    if not USE_NUMBA:
        return fn
    return numba.njit(cache=True)(fn)


def force_njit(fn):
    """Compile regardless of the env flag (used by the benchmark)."""
    if not HAVE_NUMBA:
        raise RuntimeError("numba is not installed")
    return numba.njit(cache=True)(fn)
