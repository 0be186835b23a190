"""Build the optional compiled kernels.

The package works without them: ``sspdc._kernels`` falls back to the numpy
implementation when the extension is missing or fails to import.
"""

import os

from setuptools import setup

ext_modules = []
if os.environ.get("SSPDC_NO_EXT") != "1":
    try:
        import numpy as np
        from Cython.Build import cythonize
        from setuptools import Extension

        ext = Extension(
            "sspdc._kernels._ckernels",
            ["src/sspdc/_kernels/_ckernels.pyx"],
            include_dirs=[np.get_include()],
            extra_compile_args=["-O3"],
            define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
        )
        ext_modules = cythonize(
            [ext],
            compiler_directives={
                "language_level": "3",
                "boundscheck": False,
                "wraparound": False,
                "cdivision": True,
            },
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
