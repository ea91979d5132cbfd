import numpy
from setuptools import setup
from setuptools.extension import Extension

from Cython.Build import cythonize

extensions = [
    Extension(
        "gazeid._convkernels",
        ["src/gazeid/_convkernels.pyx"],
        include_dirs=[numpy.get_include()],
        extra_compile_args=["-O3"],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
    )
]

setup(ext_modules=cythonize(extensions, language_level=3))
