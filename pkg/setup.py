"""Build shim for the optional compiled field kernels.

The package is pure Python apart from ``trapqa.kernels._rect_cy``, a Cython
translation of the rectangle potential/field kernels. If Cython or a C
compiler is unavailable the extension is simply skipped; ``trapqa.kernels``
falls back to the numpy implementation at import time.
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
                "trapqa.kernels._rect_cy",
                ["src/trapqa/kernels/_rect_cy.pyx"],
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
