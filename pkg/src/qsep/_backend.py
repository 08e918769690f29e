"""Kernel selection: compiled extension when importable, NumPy otherwise.

Set ``QSEP_BACKEND=python`` to force the NumPy fallback.
"""

import os

from qsep import _kernels_py

kernels = _kernels_py
BACKEND = "python"

if os.environ.get("QSEP_BACKEND", "").strip().lower() != "python":
    try:
        from qsep import _kernels as _compiled
    except ImportError:
        pass
    else:
        kernels = _compiled
        BACKEND = "cython"
