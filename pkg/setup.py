"""Build script: compiles the optional Cython integrator core.

The compiled extension accelerates the per-point master-equation and
rate-equation integrations by roughly two orders of magnitude.  If no C
compiler (or Cython) is available the build degrades gracefully and the
package falls back to the pure-NumPy kernels at import time.
"""

import sys

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class OptionalBuildExt(build_ext):
    """Build the accelerator if possible, warn and continue otherwise."""

    def run(self):
        try:
            super().run()
        except Exception as exc:  # compiler missing, etc.
            self._warn(exc)

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            self._warn(exc)

    @staticmethod
    def _warn(exc):
        print(
            f"WARNING: building the slapsim._backend._core extension failed "
            f"({exc}); falling back to the pure-Python kernels.",
            file=sys.stderr,
        )


def extensions():
    try:
        from Cython.Build import cythonize
    except ImportError:
        print(
            "WARNING: Cython not available; building slapsim without the "
            "compiled integrator core.",
            file=sys.stderr,
        )
        return []
    ext = Extension(
        "slapsim._backend._core",
        ["src/slapsim/_backend/_core.pyx"],
        extra_compile_args=["-O3"],
    )
    return cythonize([ext], language_level=3)


setup(
    ext_modules=extensions(),
    cmdclass={"build_ext": OptionalBuildExt},
)
