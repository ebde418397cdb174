"""Backend selection for the node-statistics kernels.

The compiled extension is preferred; set ``FUZZYID3_BACKEND=python`` to force
the numpy fallback (``cython`` makes a missing extension an import error).
"""

import os

from . import _pykernels

_requested = os.environ.get("FUZZYID3_BACKEND", "").strip().lower()

if _requested == "python":
    _impl = _pykernels
else:
    try:
        from . import _ckernels as _impl
    except ImportError:
        if _requested == "cython":
            raise
        _impl = _pykernels

BACKEND = "cython" if _impl is not _pykernels else "python"

node_statistics = _impl.node_statistics
candidate_gains = _impl.candidate_gains


def available_backends():
    """Map backend name to kernel module for every backend importable here."""
    out = {"python": _pykernels}
    try:
        from . import _ckernels
    except ImportError:
        pass
    else:
        out["cython"] = _ckernels
    return out
