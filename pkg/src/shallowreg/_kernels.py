"""Kernel backend selection.

Imports the compiled extension when available, otherwise falls back to the
NumPy implementations. Set ``SHALLOWREG_PURE=1`` to force the fallback
(used by the parity tests and the benchmark).
"""

from __future__ import annotations

import os

from . import _kernels_numpy

if os.environ.get("SHALLOWREG_PURE", "") == "1":
    _impl = _kernels_numpy
else:
    try:
        from . import _core as _impl  # type: ignore[no-redef]
    except ImportError:
        _impl = _kernels_numpy

BACKEND: str = _impl.BACKEND
relu_forward = _impl.relu_forward
pathnorm_relu_ascent = _impl.pathnorm_relu_ascent
