"""Pick the Gram-sum implementation at import time.

The compiled extension is preferred; set ``MMDROBUST_PURE_PYTHON=1`` to
force the NumPy fallback (useful for benchmarking and debugging).
"""

import os

from . import _core_py

if os.environ.get("MMDROBUST_PURE_PYTHON", "") not in ("", "0"):
    _impl = _core_py
    BACKEND = "python"
else:
    try:
        from . import _core as _impl
        BACKEND = "cython"
    except ImportError:  # extension not built
        _impl = _core_py
        BACKEND = "python"

cross_rowsums = _impl.cross_rowsums
self_rowsums = _impl.self_rowsums

__all__ = ["BACKEND", "cross_rowsums", "self_rowsums"]
