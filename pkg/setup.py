"""Build script for the compiled kernel extension.

The extension is optional at runtime: when it fails to build or import,
the package falls back to the pure-Python kernels in
``spherebot._kernels_py``.
"""

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "spherebot._kernels",
                sources=["src/spherebot/_kernels.pyx"],
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    ext_modules = []

setup(ext_modules=ext_modules)
