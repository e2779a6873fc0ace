from Cython.Build import cythonize
from setuptools import Extension, setup

setup(
    ext_modules=cythonize(
        [Extension("foliage._kernels", ["src/foliage/_kernels.pyx"],
                   extra_compile_args=["-O3", "-fcx-limited-range", "-fno-math-errno", "-funroll-loops"])],
        language_level=3,
    ),
)
