from setuptools import Extension, setup

try:
    import numpy
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "hdlp._cd_fast",
                ["src/hdlp/_cd_fast.pyx"],
                include_dirs=[numpy.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        compiler_directives={"language_level": 3},
    )
except ImportError:
    # No Cython/numpy at build time: install pure-Python only, the
    # package falls back to hdlp._cd_py at import.
    ext_modules = []

setup(ext_modules=ext_modules)
