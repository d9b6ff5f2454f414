"""Builds the optional compiled kernels.

The package works without them: ``facestyle.kernels`` falls back to the
pure-Python implementation when ``facestyle._kernels`` cannot be imported.
Set FACESTYLE_NO_EXT=1 to skip the extension build entirely.
"""
import os

from setuptools import setup

ext_modules = []
if not os.environ.get("FACESTYLE_NO_EXT"):
    try:
        from Cython.Build import cythonize
        from setuptools import Extension
    except ImportError:
        pass
    else:
        ext_modules = cythonize(
            [
                Extension(
                    "facestyle._kernels",
                    ["src/facestyle/_kernels.pyx"],
                    # bit-identical results with the fallback need plain IEEE mul/add
                    # and real libm calls (gcc otherwise merges sin+cos into sincos,
                    # which differs by an ulp on some inputs)
                    extra_compile_args=["-O2", "-ffp-contract=off", "-fno-builtin"],
                    libraries=["m"],
                )
            ],
            compiler_directives={"language_level": "3"},
        )

setup(ext_modules=ext_modules)
