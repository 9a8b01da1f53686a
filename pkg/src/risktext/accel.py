"""Backend selection for the hot kernels.

Each kernel in :mod:`risktext.kernels` has two implementations: a numba
``@njit`` version and a pure-numpy version.  Which one runs is decided once,
at import time:

* if numba is importable and ``RISKTEXT_DISABLE_NUMBA`` is unset (or set to
  something falsy), the jitted version is used;
* otherwise the numpy version is used.

Both paths implement the same algorithms and agree on their outputs; the
benchmark script under ``benchmarks/`` measures the difference in speed.
"""

import os

ENV_FLAG = "RISKTEXT_DISABLE_NUMBA"

_disabled = os.environ.get(ENV_FLAG, "").strip().lower() in ("1", "true", "yes")

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised via the env flag instead
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        """Stand-in decorator so kernel definitions import without numba."""

        def wrap(func):
            return func

        if args and callable(args[0]):
            return args[0]
        return wrap


USE_NUMBA = HAVE_NUMBA and not _disabled
