"""Build script: compiles the optional fast kernel.

The package is fully functional without the extension (pure-Python paths are
selected at import time), so a failed compile only costs speed.
"""

import sys

from setuptools import Extension, setup


def extensions():
    try:
        from Cython.Build import cythonize
    except ImportError:
        print("etac: Cython unavailable, building without the fast kernel", file=sys.stderr)
        return []
    try:
        return cythonize(
            [
                Extension(
                    "etac._kernel",
                    ["src/etac/_kernel.pyx"],
                    extra_compile_args=["-O3"],
                )
            ],
            compiler_directives={"language_level": "3"},
        )
    except Exception as exc:  # pragma: no cover - toolchain trouble
        print(f"etac: kernel build skipped ({exc})", file=sys.stderr)
        return []


setup(ext_modules=extensions())
