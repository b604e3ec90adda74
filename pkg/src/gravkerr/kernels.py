"""Backend selection for the hot two-mode kernels.

The compiled extension is used when it imports; otherwise the numpy
fallback.  Set ``GRAVKERR_PURE_PYTHON=1`` to force the fallback.
"""
import os

from . import _kernels_py

BACKEND = "python"
mz_apply = _kernels_py.mz_apply
thg_apply = _kernels_py.thg_apply

if not os.environ.get("GRAVKERR_PURE_PYTHON"):
    try:
        from . import _kernels as _compiled
    except ImportError:
        _compiled = None
    if _compiled is not None:
        BACKEND = "cython"
        mz_apply = _compiled.mz_apply
        thg_apply = _compiled.thg_apply


def backends():
    """Return the available backends as a ``{name: module}`` mapping."""
    found = {"python": _kernels_py}
    try:
        from . import _kernels as compiled
        found["cython"] = compiled
    except ImportError:
        pass
    return found
