"""Build script for the optional compiled kernels.

The extension is optional: if Cython or a C compiler is missing the package
installs anyway and ``randexp`` falls back to the pure-Python kernels.

    pip install -e . --no-build-isolation
"""

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:  # pragma: no cover
    ext_modules = []
else:
    ext_modules = cythonize(
        [
            Extension(
                "randexp._ckernels",
                ["src/randexp/_ckernels.pyx"],
                # bit-reproducible float arithmetic: no FMA contraction, no fast-math
                extra_compile_args=["-O2", "-ffp-contract=off"],
                optional=True,
            )
        ],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=ext_modules)
