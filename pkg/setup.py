from setuptools import Extension, setup

# The compiled kernel is optional: ipof._kernels falls back to the NumPy
# implementation when the extension is missing or fails to import.
try:
    from Cython.Build import cythonize

    extensions = cythonize(
        [
            Extension(
                "ipof._kernels._native",
                ["src/ipof/_kernels/_native.pyx"],
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    extensions = []

setup(ext_modules=extensions)
