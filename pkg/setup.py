"""Builds the optional compiled GRU kernel.

The package works without it (a NumPy fallback is selected at import time),
so a missing compiler or Cython only costs speed, never correctness.
"""

from setuptools import Extension, setup

try:
    import numpy
    from Cython.Build import cythonize
except ImportError:
    ext_modules = []
else:
    ext_modules = cythonize(
        [
            Extension(
                "dpdfnet.nn._gru_cy",
                ["src/dpdfnet/nn/_gru_cy.pyx"],
                include_dirs=[numpy.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        language_level="3",
    )

setup(ext_modules=ext_modules)
