"""Build hook for the optional compiled kernels.

The compiled extension is a pure speedup; if Cython or a C compiler is
unavailable the install proceeds and the package falls back to the numpy
kernels at import time.
"""

import warnings

from setuptools import setup
from setuptools.command.build_ext import build_ext


class optional_build_ext(build_ext):
    def run(self):
        try:
            super().run()
        except Exception as exc:  # compiler missing, etc.
            warnings.warn(f"compiled kernels skipped: {exc}")

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            warnings.warn(f"compiled kernels skipped: {exc}")


def extensions():
    try:
        import numpy
        from Cython.Build import cythonize
        from setuptools import Extension
    except ImportError as exc:
        warnings.warn(f"compiled kernels skipped: {exc}")
        return []
    ext = Extension(
        "matchbench._kernels._speedups",
        sources=["src/matchbench/_kernels/_speedups.pyx"],
        include_dirs=[numpy.get_include()],
        extra_compile_args=["-O3"],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
    )
    return cythonize([ext], compiler_directives={"language_level": "3"})


setup(ext_modules=extensions(), cmdclass={"build_ext": optional_build_ext})
