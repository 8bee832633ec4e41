"""Build script for the optional Cython kernels.

The package works without the compiled extension; ``jcpath.kernels`` falls
back to the numpy implementation when ``_ckernel`` cannot be imported.
"""
import os

from setuptools import setup

ext_modules = []
if not os.environ.get("JCPATH_NO_EXT"):
    try:
        import numpy as np
        from Cython.Build import cythonize
        from setuptools import Extension
    except ImportError:
        pass
    else:
        ext_modules = cythonize(
            [
                Extension(
                    "jcpath.kernels._ckernel",
                    ["src/jcpath/kernels/_ckernel.pyx"],
                    include_dirs=[np.get_include()],
                    extra_compile_args=["-O3", "-fcx-limited-range"],
                )
            ],
            compiler_directives={"language_level": "3"},
        )

setup(ext_modules=ext_modules)
