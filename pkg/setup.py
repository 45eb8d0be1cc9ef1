import os

from setuptools import Extension, setup

ext_modules = []
if os.environ.get("NLSPREAD_NO_EXT") != "1":
    try:
        import numpy as np
        from Cython.Build import cythonize
    except ImportError:
        pass
    else:
        # no FMA contraction: stage arithmetic must round like the numpy path
        flags = ["-O3", "-ffp-contract=off"]
        if os.environ.get("NLSPREAD_PORTABLE") != "1":
            flags.append("-march=native")
        ext_modules = cythonize(
            [
                Extension(
                    "nlspread._core",
                    ["src/nlspread/_core.pyx"],
                    include_dirs=[np.get_include(), "src/nlspread"],
                    extra_compile_args=flags,
                    define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                )
            ],
            compiler_directives={"language_level": "3"},
        )

setup(ext_modules=ext_modules)
