from setuptools import Extension, setup

try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "scenebridge.dynamics._masskernel",
                ["src/scenebridge/dynamics/_masskernel.pyx"],
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    # Pure-python kernel is selected at import when the extension is missing.
    ext_modules = []

setup(ext_modules=ext_modules)
