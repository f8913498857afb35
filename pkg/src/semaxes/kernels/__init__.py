"""Hot numeric kernels with a numba path and a pure-numpy fallback.

The numba path is used when numba imports cleanly, unless the environment
variable ``SEMAXES_DISABLE_NUMBA`` is set to a truthy value (``1``, ``true``,
``yes``). The flag is read once, at import time. Both implementations stay
importable as ``kernels.numpy_impl`` and ``kernels.numba_impl`` (the latter is
``None`` when numba is unavailable), which is what the benchmark and the
cross-path equivalence tests use.
"""

import os

from . import _numpy as numpy_impl

try:
    from . import _numba as numba_impl
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba_impl = None

LINKAGE_CODES = {"average": 0, "single": 1, "complete": 2}
NONLINEARITY_CODES = {"logcosh": 0, "exp": 1, "cube": 2}


def _disabled_by_env():
    return os.environ.get("SEMAXES_DISABLE_NUMBA", "").strip().lower() in {"1", "true", "yes"}


USE_NUMBA = numba_impl is not None and not _disabled_by_env()
BACKEND = "numba" if USE_NUMBA else "numpy"

_impl = numba_impl if USE_NUMBA else numpy_impl

agglomerate = _impl.agglomerate
label_block_sums = _impl.label_block_sums


def contrast(Y, kind):
    # numpy's vectorised tanh beats numba's scalar loop by about 3x (see the
    # benchmark), so logcosh stays on numpy on both paths
    if kind == 0 or not USE_NUMBA:
        return numpy_impl.contrast(Y, kind)
    return numba_impl.contrast(Y, kind)

__all__ = [
    "BACKEND",
    "LINKAGE_CODES",
    "NONLINEARITY_CODES",
    "USE_NUMBA",
    "agglomerate",
    "contrast",
    "label_block_sums",
    "numba_impl",
    "numpy_impl",
]
