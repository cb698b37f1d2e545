"""Backend selection for the compiled kernels.

Set ``FREDHOLM_BVP_DISABLE_NUMBA=1`` before import to force the pure-numpy
path. The numpy path is also used when numba is not installed.
"""

import os

ENV_FLAG = "FREDHOLM_BVP_DISABLE_NUMBA"

try:
    import numba

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    numba = None
    HAVE_NUMBA = False

USE_NUMBA = HAVE_NUMBA and os.environ.get(ENV_FLAG, "").strip().lower() not in {
    "1",
    "true",
    "yes",
    "on",
}


def njit(*args, **kwargs):
    """``numba.njit`` with ``cache=True``; identity decorator without numba."""
    kwargs.setdefault("cache", True)
    if HAVE_NUMBA:
        return numba.njit(*args, **kwargs)

    def wrap(func):  # pragma: no cover
        return func

    if len(args) == 1 and callable(args[0]):  # pragma: no cover
        return args[0]
    return wrap  # pragma: no cover
