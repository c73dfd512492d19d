"""Backend selection for the patch kernels.

The compiled extension is used when it imports; setting the environment
variable ``PNPPR_PURE_PYTHON=1`` forces the NumPy fallback.
"""

import os

from . import _pykernels

BACKEND = "python"
nlm = _pykernels.nlm
block_match = _pykernels.block_match

if not os.environ.get("PNPPR_PURE_PYTHON"):
    try:
        from . import _ckernels
    except ImportError:
        pass
    else:
        BACKEND = "cython"
        nlm = _ckernels.nlm
        block_match = _ckernels.block_match
