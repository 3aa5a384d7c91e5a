"""Build hook for the optional compiled kernels.

The package is fully functional without the extension (a numpy fallback is
selected at import time), so a missing Cython is not fatal.
"""
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    ext_modules = []
else:
    ext_modules = cythonize(
        [
            Extension(
                "czscatter._kernels",
                ["src/czscatter/_kernels.pyx"],
                extra_compile_args=["-O3"],
            )
        ],
        language_level=3,
    )

setup(ext_modules=ext_modules)
