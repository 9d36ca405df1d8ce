"""Builds the optional compiled slot kernel; the package falls back to pure Python without it."""

import os

from setuptools import Extension, setup

ext_modules = []
if os.environ.get("MESHCAP_NO_EXT") != "1":
    try:
        from Cython.Build import cythonize
    except ImportError:
        cythonize = None
    if cythonize is not None:
        ext_modules = cythonize(
            [Extension("meshcap._kernel", ["src/meshcap/_kernel.pyx"],
                       extra_compile_args=["-O3"])],
            compiler_directives={"language_level": "3"},
        )

setup(ext_modules=ext_modules)
