from setuptools import setup

try:
    from Cython.Build import cythonize
except ImportError:
    ext_modules = []
else:
    ext_modules = cythonize(
        ["src/lpreps/_kernels.pyx"], compiler_directives={"language_level": "3"}, quiet=True
    )

setup(ext_modules=ext_modules)
