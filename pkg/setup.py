import os

import numpy as np
from setuptools import Extension, setup

ext_modules = []
if os.environ.get("TSAUDIT_NO_EXT", "") != "1":
    try:
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [
                Extension(
                    "tsaudit._kernels",
                    ["src/tsaudit/_kernels.pyx"],
                    include_dirs=[np.get_include()],
                    define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                )
            ],
            compiler_directives={"language_level": "3"},
        )
    except ImportError:
        # no Cython: package falls back to tsaudit._kernels_py at import
        ext_modules = []

setup(ext_modules=ext_modules)
