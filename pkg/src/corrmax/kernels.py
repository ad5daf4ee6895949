"""Kernel backend selection.

The compiled extension is used when it imports; otherwise the numpy
implementation. Set ``CORRMAX_PURE=1`` to force the fallback.
"""

import os

from . import _kernels_py

BACKEND = "python"
max_abs_offdiag = _kernels_py.max_abs_offdiag

if os.environ.get("CORRMAX_PURE") != "1":
    try:
        from . import _kernels as _compiled
    except ImportError:
        _compiled = None
    else:
        BACKEND = "compiled"
        max_abs_offdiag = _compiled.max_abs_offdiag


def available_backends():
    """Map backend name to kernel function for every importable backend."""
    out = {"python": _kernels_py.max_abs_offdiag}
    try:
        from . import _kernels
    except ImportError:
        pass
    else:
        out["compiled"] = _kernels.max_abs_offdiag
    return out
