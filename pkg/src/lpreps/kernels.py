"""Backend selection for the Hamming-code kernels.

The compiled extension is preferred; the numpy implementation is used when
the extension was not built.  ``LPREPS_KERNELS=numpy`` forces the fallback.
"""

from __future__ import annotations

import os

if os.environ.get("LPREPS_KERNELS") == "numpy":
    from . import _kernels_py as _backend
else:
    try:
        from . import _kernels as _backend  # type: ignore[attr-defined]
    except ImportError:
        from . import _kernels_py as _backend

BACKEND: str = _backend.BACKEND
greedy_code = _backend.greedy_code
min_pairwise_distance = _backend.min_pairwise_distance

__all__ = ["BACKEND", "greedy_code", "min_pairwise_distance"]
