"""Select the compiled kernels when available, else the numpy fallback.

Set ``ZOMBIE_TORUS_PURE=1`` to force the fallback.
"""
import os

from . import _pykernels

kernels = _pykernels
if os.environ.get("ZOMBIE_TORUS_PURE", "") not in ("1", "true", "yes"):
    try:
        from . import _kernels as kernels  # type: ignore[no-redef]
    except ImportError:
        pass

BACKEND = kernels.NAME
