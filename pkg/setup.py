"""Build script for the optional compiled Wigner kernel.

The package works without the extension: if compilation fails (no compiler,
no Cython) the pure-NumPy kernel in ``magnonadd._kernels_py`` is used.
"""
import os

import numpy as np
from setuptools import setup
from setuptools.extension import Extension

ext_modules = []
if os.environ.get("MAGNONADD_NO_EXT", "") != "1":
    try:
        from Cython.Build import cythonize
    except ImportError:
        cythonize = None
    if cythonize is not None:
        ext_modules = cythonize(
            [
                Extension(
                    "magnonadd._wigner_ext",
                    sources=["src/magnonadd/_wigner_ext.pyx"],
                    include_dirs=[np.get_include()],
                    extra_compile_args=["-O3"],
                    define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                )
            ],
            compiler_directives={"language_level": "3"},
        )

setup(ext_modules=ext_modules)
