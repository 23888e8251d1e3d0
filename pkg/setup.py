"""Build script for the optional compiled stencil kernels.

The package is fully functional without the extension: ``timecloak.kernels``
falls back to vectorized NumPy updates when ``timecloak.kernels._core`` is not
importable.  The extension only accelerates the inner time-stepping loops.
"""

from setuptools import setup

try:
    import numpy
    from Cython.Build import cythonize

    ext_modules = cythonize(
        ["src/timecloak/kernels/_core.pyx"],
        compiler_directives={"language_level": "3"},
    )
    include_dirs = [numpy.get_include()]
except ImportError:
    ext_modules = []
    include_dirs = []

setup(ext_modules=ext_modules, include_dirs=include_dirs)
