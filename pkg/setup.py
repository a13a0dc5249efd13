import os

from setuptools import setup

ext_modules = []
if os.environ.get("HOROLAB_NO_EXT") != "1":
    try:
        from Cython.Build import cythonize
        from setuptools import Extension

        ext_modules = cythonize(
            [
                Extension(
                    "horolab.kernels._fast",
                    ["src/horolab/kernels/_fast.pyx"],
                    extra_compile_args=["-O3"],
                )
            ],
            language_level=3,
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
