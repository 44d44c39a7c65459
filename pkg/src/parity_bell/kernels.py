"""Kernel backend selection.

The compiled Cython module is used when it was built; otherwise the numpy
fallback in ``_pykernels``. Setting ``PARITY_BELL_PURE=1`` in the
environment forces the fallback.
"""

import os

from . import _pykernels

if os.environ.get("PARITY_BELL_PURE", "") not in ("", "0"):
    _impl = _pykernels
    BACKEND = "python"
else:
    try:
        from . import _ckernels as _impl
        BACKEND = "cython"
    except ImportError:
        _impl = _pykernels
        BACKEND = "python"

hermite_table = _impl.hermite_table
pair_sum = _impl.pair_sum
chsh_ascent = _impl.chsh_ascent

__all__ = ["BACKEND", "hermite_table", "pair_sum", "chsh_ascent"]
