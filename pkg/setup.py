import os

from setuptools import Extension, setup

# SIGJOIN_NO_EXT=1 installs the pure-Python backend only.
ext_modules = []
if not os.environ.get("SIGJOIN_NO_EXT"):
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [Extension("sigjoin._kernels", ["src/sigjoin/_kernels.pyx"],
                   extra_compile_args=["-O3"])],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=ext_modules)
