"""Build the optional Cython core.

If compilation fails the package still installs and runs on the NumPy
fallback in ``mmdrobust._core_py``.

Developers, to rebuild in place::

    python3 setup.py build_ext --inplace
"""

import sys

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class OptionalBuildExt(build_ext):
    def run(self):
        try:
            super().run()
        except Exception as exc:  # noqa: BLE001
            print(f"warning: Cython core not built ({exc}); using NumPy fallback",
                  file=sys.stderr)

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:  # noqa: BLE001
            print(f"warning: failed to build {ext.name} ({exc})", file=sys.stderr)


def extensions():
    try:
        import numpy as np
        from Cython.Build import cythonize
    except ImportError:
        return []
    # -ffast-math only at compile time so glibc's vector exp is used;
    # leaving it off the link line keeps crtfastmath (FTZ/DAZ) out of the .so.
    # The vectorised exp it emits lives in libmvec.
    ext = Extension(
        "mmdrobust._core",
        ["src/mmdrobust/_core.pyx"],
        include_dirs=[np.get_include()],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
        extra_compile_args=["-O3", "-ffast-math", "-march=native"],
        extra_link_args=["-lmvec", "-lm"],
    )
    return cythonize([ext], compiler_directives={"language_level": "3"})


setup(ext_modules=extensions(), cmdclass={"build_ext": OptionalBuildExt})
