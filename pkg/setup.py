"""Build script: compiles the optional simulator kernel extension.

The package works without the extension (a numpy fallback is selected at
import time), so the build degrades gracefully when Cython is missing.
"""

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    ext_modules = []
else:
    ext_modules = cythonize(
        [
            Extension(
                "kflats.simulator._kernel",
                ["src/kflats/simulator/_kernel.pyx"],
            )
        ],
        language_level="3",
    )

setup(ext_modules=ext_modules)
