"""Build script for the optional compiled statevector kernels.

The package is fully functional without the extension (a NumPy fallback is
selected at import time); building it just makes the hot gate-application
loops faster.
"""

import numpy as np
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize

    extensions = cythonize(
        [
            Extension(
                "fermiforge._kernels",
                sources=["src/fermiforge/_kernels.pyx"],
                include_dirs=[np.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                extra_compile_args=["-O3"],
            )
        ],
        language_level=3,
    )
except ImportError:
    extensions = []

setup(ext_modules=extensions)
