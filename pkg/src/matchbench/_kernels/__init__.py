"""Kernel backend selection.

The compiled extension is used when it imported cleanly; otherwise the numpy
implementations take over with identical semantics. Set MATCHBENCH_PURE=1 to
force the numpy path (useful for benchmarking and debugging).
"""

from __future__ import annotations

import os

from . import pure

if os.environ.get("MATCHBENCH_PURE", "") not in ("", "0"):
    _impl = pure
else:
    try:
        from . import _speedups as _impl  # type: ignore[no-redef]
    except ImportError:
        _impl = pure

BACKEND: str = _impl.BACKEND

logistic_value_grad = _impl.logistic_value_grad
hinge_value_grad = _impl.hinge_value_grad
logistic_gd = _impl.logistic_gd
hinge_subgradient = _impl.hinge_subgradient
midranks = _impl.midranks
roc_auc_kernel = _impl.roc_auc_kernel

__all__ = [
    "BACKEND",
    "pure",
    "logistic_value_grad",
    "hinge_value_grad",
    "logistic_gd",
    "hinge_subgradient",
    "midranks",
    "roc_auc_kernel",
]
