"""Build the optional Cython kernel.

If Cython or a C compiler is unavailable the package still installs and
falls back to the numpy implementation at import time.
"""
import os

import numpy
from setuptools import setup
from setuptools.command.build_ext import build_ext

ext_modules = []
if os.environ.get("CORRMAX_NO_EXT") != "1":
    try:
        from Cython.Build import cythonize
    except ImportError:
        pass
    else:
        from setuptools import Extension

        ext_modules = cythonize(
            [
                Extension(
                    "corrmax._kernels",
                    ["src/corrmax/_kernels.pyx"],
                    include_dirs=[numpy.get_include()],
                    extra_compile_args=["-O3", "-ffp-contract=off"],
                )
            ],
            compiler_directives={"language_level": "3"},
        )


class OptionalBuildExt(build_ext):
    def run(self):
        try:
            super().run()
        except Exception as exc:  # compiler missing
            print(f"warning: skipping compiled kernel ({exc})")

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            print(f"warning: failed to build {ext.name} ({exc})")


setup(ext_modules=ext_modules, cmdclass={"build_ext": OptionalBuildExt})
