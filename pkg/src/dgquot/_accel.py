"""Backend selection for the hot kernels.

Set ``DGQUOT_DISABLE_NUMBA=1`` to force the pure-numpy code paths even when
numba is importable. ``DGQUOT_THREADS`` caps the numba thread pool.
"""

from __future__ import annotations

import os

DISABLE_ENV = "DGQUOT_DISABLE_NUMBA"
THREADS_ENV = "DGQUOT_THREADS"

try:
    import numba

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is an optional accelerator
    numba = None
    HAVE_NUMBA = False


def _flag(name: str) -> bool:
    return os.environ.get(name, "").strip().lower() in ("1", "true", "yes", "on")


USE_NUMBA = HAVE_NUMBA and not _flag(DISABLE_ENV)

if USE_NUMBA and os.environ.get(THREADS_ENV):
    numba.set_num_threads(max(1, min(int(os.environ[THREADS_ENV]), numba.config.NUMBA_NUM_THREADS)))


def njit(fn):
    """Compile ``fn`` with numba when available; otherwise return it unchanged."""
    if not HAVE_NUMBA:
        return fn
    return numba.njit(cache=True, nogil=True)(fn)
