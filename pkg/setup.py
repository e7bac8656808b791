from setuptools import setup

try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        ["src/flowspace/_kernels/_speedups.pyx"],
        language_level=3,
    )
except ImportError:
    # No Cython at build time: install pure; the package falls back at import.
    ext_modules = []

setup(ext_modules=ext_modules)
