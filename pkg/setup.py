"""Builds the optional C kernel for string distances.

The package works without it: netrans.simdist falls back to the pure-Python
kernel when the extension is missing.  Build in place for development with

    python setup.py build_ext --inplace
"""

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize

    extensions = cythonize(
        [Extension("netrans._simdist_c", ["src/netrans/_simdist_c.pyx"])],
        language_level="3",
    )
except ImportError:
    extensions = []

setup(ext_modules=extensions)
