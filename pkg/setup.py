"""Build script.  The compiled lattice kernel is optional: if Cython or a C
compiler is unavailable the package installs anyway and falls back to the
pure-Python twin at import time."""

from setuptools import setup

ext_modules = []
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        ["src/gradescent/_latcore.pyx"],
        compiler_directives={
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
            "language_level": "3",
        },
    )
except Exception as exc:  # pragma: no cover - build-environment dependent
    print(f"gradescent: skipping compiled kernel ({exc})")

setup(ext_modules=ext_modules)
