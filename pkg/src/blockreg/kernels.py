"""Selects the coordinate-descent kernel at import time.

The compiled extension is used when present; setting the environment variable
``BLOCKREG_PURE_PYTHON=1`` before import forces the pure-Python fallback
(useful for benchmarking and debugging).
"""
from __future__ import annotations

import os

from . import _cd_py

if os.environ.get("BLOCKREG_PURE_PYTHON"):
    _impl = _cd_py
    BACKEND = "python"
else:
    try:
        from . import _cdcore as _impl  # type: ignore[no-redef]

        BACKEND = "compiled"
    except ImportError:
        _impl = _cd_py
        BACKEND = "python"

cd_sweeps = _impl.cd_sweeps


def backend_name() -> str:
    """Which kernel is active: "compiled" or "python"."""
    return BACKEND
