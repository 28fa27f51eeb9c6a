"""Kernel dispatch: compiled extension if importable, else pure Python.

Set ``CONELAB_PURE_PYTHON=1`` to force the fallback.
"""

from __future__ import annotations

import os

from . import _pykernels

BACKEND = "python"
_impl = _pykernels

if not os.environ.get("CONELAB_PURE_PYTHON"):
    try:
        from . import _ckernels as _impl  # type: ignore[no-redef]

        BACKEND = "cython"
    except ImportError:  # extension not built
        _impl = _pykernels

soc_margins = _impl.soc_margins
jacobi_eigvalsh = _impl.jacobi_eigvalsh
nilpotent_candidates = _impl.nilpotent_candidates

__all__ = ["BACKEND", "soc_margins", "jacobi_eigvalsh", "nilpotent_candidates"]
