"""Selects the compiled kernels when available, the numpy reference otherwise.

Set ``ODVOTE_PURE=1`` to force the reference path.
"""

import os

from . import _kernels_py

if os.environ.get("ODVOTE_PURE"):
    kernels = _kernels_py
else:
    try:
        from . import _kernels as kernels
    except ImportError:  # extension not built
        kernels = _kernels_py

BACKEND = "python" if kernels is _kernels_py else "cython"
