"""Select the compiled kernels when available.

Set ``GVMIX_PURE_PYTHON=1`` to force the NumPy fallback.
"""
from __future__ import annotations

import os

from . import _fallback

KIND_RP = _fallback.KIND_RP
KIND_LP = _fallback.KIND_LP
KIND_POINT = _fallback.KIND_POINT

if os.environ.get("GVMIX_PURE_PYTHON", "") not in ("", "0"):
    _impl = _fallback
else:
    try:
        from . import _kernels as _impl
    except ImportError:
        _impl = _fallback

NAME = "compiled" if _impl is not _fallback else "python"

lp_neglog_quantile = _impl.lp_neglog_quantile
neumaier_sum = _impl.neumaier_sum
replicate = _impl.replicate
