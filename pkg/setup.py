"""Builds the optional Cython speedup extension.

The package works without it (pure-Python fallback is selected at import),
so a failed build is downgraded to a warning rather than an install error.
"""

import warnings

from setuptools import setup

ext_modules = []
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        ["src/gpig/_fastcore.pyx"],
        compiler_directives={"language_level": "3"},
    )
except Exception as exc:  # pragma: no cover - build environment dependent
    warnings.warn(f"building without the compiled core: {exc}")

setup(ext_modules=ext_modules)
