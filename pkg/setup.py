"""Build script for the compiled kernel extension.

The package works without the extension (a numpy fallback is selected at
import time); building it is strongly recommended for FER sweeps.
"""

from setuptools import setup
from setuptools.extension import Extension

ext_modules = []
try:
    import numpy
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "polarook.kernels._fast",
                sources=["src/polarook/kernels/_fast.pyx"],
                include_dirs=[numpy.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                extra_compile_args=["-O3"],
            )
        ],
        language_level=3,
    )
except ImportError:
    pass

setup(ext_modules=ext_modules)
