"""Build script: compiles the optional Cython kernel extension.

The package works without the extension (a pure-Python fallback is
selected at import time), so any build failure here is non-fatal.
"""

from setuptools import Extension, setup

ext_modules = []
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [Extension("sharpflat._kernels._ckernels",
                   ["src/sharpflat/_kernels/_ckernels.pyx"])],
        language_level=3,
    )
except Exception as exc:  # Cython missing or cythonize failed
    print(f"sharpflat: skipping compiled kernels ({exc!r}); "
          "the pure-Python fallback will be used")

setup(ext_modules=ext_modules)
