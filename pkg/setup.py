# Builds the optional compiled series kernel.  The package works without it
# (a pure-Python twin is selected at import time), so any build failure here
# degrades gracefully instead of blocking installation.
#
#   python setup.py build_ext --inplace      # compile in a source checkout
#   BELLSHAPE_NO_EXT=1 pip install .          # skip the extension entirely

import os

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class optional_build_ext(build_ext):
    def run(self):
        try:
            super().run()
        except Exception as exc:  # compiler missing, etc.
            print(f"warning: compiled kernel skipped ({exc}); using pure-Python fallback")

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            print(f"warning: building {ext.name} failed ({exc}); using pure-Python fallback")


ext_modules = []
if not os.environ.get("BELLSHAPE_NO_EXT"):
    try:
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [
                Extension(
                    "bellshape._kernels._series_cy",
                    sources=["src/bellshape/_kernels/_series_cy.pyx"],
                )
            ],
            language_level="3",
        )
    except ImportError:
        print("warning: Cython not available; using pure-Python fallback")

setup(
    ext_modules=ext_modules,
    cmdclass={"build_ext": optional_build_ext},
)
