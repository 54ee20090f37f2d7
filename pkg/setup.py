import os

from setuptools import Extension, setup

ext_modules = []
if os.environ.get("ASSERTIFY_NO_EXT") != "1":
    try:
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [
                Extension(
                    "assertify._kernels._lcs",
                    ["src/assertify/_kernels/_lcs.pyx"],
                )
            ],
            compiler_directives={"language_level": "3"},
        )
    except ImportError:
        # No Cython available: the pure-Python kernel is used at runtime.
        ext_modules = []

setup(ext_modules=ext_modules)
