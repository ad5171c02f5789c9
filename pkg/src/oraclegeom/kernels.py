"""Backend selection for the hot kernels.

The compiled extension is used when it was built; otherwise the numpy
fallback is imported.  Set ``ORACLE_GEOM_PURE=1`` to force the fallback.
"""
from __future__ import annotations

import os

from . import _kernels_py

if os.environ.get("ORACLE_GEOM_PURE") == "1":
    _impl = _kernels_py
    BACKEND = "python"
else:
    try:
        from . import _kernels as _impl  # type: ignore[attr-defined]

        BACKEND = "cython"
    except ImportError:
        _impl = _kernels_py
        BACKEND = "python"

seidel_lp = _impl.seidel_lp
tukey_depth = _impl.tukey_depth
disk_masks = _impl.disk_masks

__all__ = ["BACKEND", "seidel_lp", "tukey_depth", "disk_masks"]
