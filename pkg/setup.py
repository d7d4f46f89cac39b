"""Build script: compiles the optional Cython backend.

The extension is a speedup only. If compilation fails for any reason
(no compiler, no Cython) the install proceeds and the package falls back
to the pure-numpy backend at import time.

-ffp-contract=off keeps the compiled floating-point expressions
bit-identical to the numpy backend (no FMA contraction of a*b+c).
"""

import sys

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class OptionalBuildExt(build_ext):
    def run(self):
        try:
            super().run()
        except Exception as exc:
            self._warn(exc)

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            self._warn(exc)

    @staticmethod
    def _warn(exc):
        print(
            "WARNING: compiled backend build failed (%s); "
            "mutsel will use the pure-Python backend" % (exc,),
            file=sys.stderr,
        )


def extensions():
    try:
        import numpy
        from Cython.Build import cythonize
    except ImportError as exc:
        print("WARNING: %s; skipping compiled backend" % (exc,), file=sys.stderr)
        return []
    ext = Extension(
        "mutsel.backends._compiled",
        ["src/mutsel/backends/_compiled.pyx"],
        include_dirs=[numpy.get_include()],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
        extra_compile_args=["-O3", "-ffp-contract=off"],
    )
    return cythonize([ext], language_level="3")


setup(ext_modules=extensions(), cmdclass={"build_ext": OptionalBuildExt})
