"""Build script: compiles the grid sweep kernel when Cython is available.

The package works without the extension (a pure-Python kernel is
selected at import time), so a failed compilation is not fatal.
"""

from setuptools import setup

ext_modules = []
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        ["src/wulffclusters/_gridcore.pyx"],
        compiler_directives={"language_level": 3},
    )
except Exception as exc:                      # noqa: BLE001
    print(f"building without the compiled grid kernel: {exc}")

setup(ext_modules=ext_modules)
