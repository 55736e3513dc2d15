"""Selects the Wigner-grid kernel at import.

The compiled ``_wigner_ext`` module is preferred. Setting the environment
variable ``MAGNONADD_NO_EXT=1`` forces the NumPy fallback.
"""
import os

from . import _kernels_py

python_wigner_points = _kernels_py.wigner_points

try:
    if os.environ.get("MAGNONADD_NO_EXT", "") == "1":
        raise ImportError("compiled kernel disabled by MAGNONADD_NO_EXT")
    from ._wigner_ext import wigner_points as compiled_wigner_points
except ImportError:
    compiled_wigner_points = None

if compiled_wigner_points is not None:
    BACKEND = "cython"
    wigner_points = compiled_wigner_points
else:
    BACKEND = "numpy"
    wigner_points = python_wigner_points
