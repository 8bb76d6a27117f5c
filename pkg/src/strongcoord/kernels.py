"""Kernel backend selection.

The compiled extension is used when it imports; set
``STRONGCOORD_PURE_PYTHON=1`` to force the numpy fallback.
"""
import os

from . import _pykernels

BACKEND = "python"
if os.environ.get("STRONGCOORD_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _ckernels as _impl

        BACKEND = "cython"
    except ImportError:
        _impl = _pykernels
else:
    _impl = _pykernels

lattice_convolve = _impl.lattice_convolve
categorical_draw = _impl.categorical_draw

__all__ = ["BACKEND", "lattice_convolve", "categorical_draw"]
