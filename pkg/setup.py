"""Build script: compiles the optional Cython sweep kernel when the toolchain allows.

The package is fully functional without the extension (a numpy fallback is
selected at import); a missing compiler or Cython must therefore never fail
the build.  `python setup.py build_ext --inplace` drops the .so next to the
fallback for development checkouts.
"""

from setuptools import setup

ext_modules = []
try:
    import numpy
    from Cython.Build import cythonize
    from setuptools import Extension

    ext_modules = cythonize(
        [
            Extension(
                "hevopt.kernels._sweep",
                ["src/hevopt/kernels/_sweep.pyx"],
                include_dirs=[numpy.get_include()],
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={
            "language_level": "3",
            "boundscheck": False,
            "wraparound": False,
            "initializedcheck": False,
            "cdivision": True,
        },
    )
except ImportError:
    pass

setup(ext_modules=ext_modules)
