"""Backend selection for the compiled kernels.

Set ``FLOQLAT_DISABLE_NUMBA=1`` to force the pure-numpy path. If numba is not
importable the numpy path is used regardless.
"""
import os

_FALSY = {"", "0", "false", "no", "off"}

NUMBA_REQUESTED = os.environ.get("FLOQLAT_DISABLE_NUMBA", "").strip().lower() in _FALSY

try:
    import numba

    NUMBA_AVAILABLE = True
    if "NUMBA_THREADING_LAYER" not in os.environ:
        # the bundled TBB is too old; avoid the probe warning
        numba.config.THREADING_LAYER = "workqueue"
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None
    NUMBA_AVAILABLE = False

USE_NUMBA = NUMBA_REQUESTED and NUMBA_AVAILABLE


def njit(*args, **kwargs):
    """``numba.njit`` when numba is importable, otherwise a no-op decorator."""
    if NUMBA_AVAILABLE:
        return numba.njit(*args, **kwargs)

    def wrap(fn):
        return fn

    if len(args) == 1 and callable(args[0]) and not kwargs:
        return args[0]
    return wrap


prange = numba.prange if NUMBA_AVAILABLE else range
