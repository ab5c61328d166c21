"""Build glue for the optional compiled enumeration kernel.

The package is pure Python except for symx/_gridkern.pyx, a grid-sweep
evaluator used by the exhaustive solver backend. If Cython or a C compiler
is unavailable the build degrades silently and the numpy fallback kernel
is picked up at import time instead.
"""

import warnings

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class optional_build_ext(build_ext):
    def run(self):
        try:
            super().run()
        except Exception as exc:  # compiler missing entirely
            warnings.warn(f"compiled kernels skipped: {exc}")

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            warnings.warn(
                f"building {ext.name} failed, falling back to pure Python: {exc}"
            )


try:
    from Cython.Build import cythonize

    extensions = cythonize(
        [
            Extension(
                "btsynth.symx._gridkern",
                ["src/btsynth/symx/_gridkern.pyx"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    extensions = []

setup(ext_modules=extensions, cmdclass={"build_ext": optional_build_ext})
