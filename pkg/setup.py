import numpy as np
from Cython.Build import cythonize
from setuptools import setup
from setuptools.extension import Extension

extensions = [
    Extension(
        "parity_bell._ckernels",
        sources=["src/parity_bell/_ckernels.pyx"],
        include_dirs=[np.get_include()],
        extra_compile_args=["-O3"],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
        optional=True,
    ),
]

setup(
    ext_modules=cythonize(extensions, compiler_directives=dict(language_level=3)),
)
