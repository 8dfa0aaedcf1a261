"""Build script for the optional compiled kernel extension.

The simulator works without the extension (a pure-Python twin is selected
at import time), but the visibility sampler and the box rasterizer are the
hot inner loops, so we compile them when a toolchain is available.

-ffp-contract=off keeps the C arithmetic bit-identical to the pure-Python
path (no fused multiply-add), which the kernel parity tests rely on.
"""

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    ext_modules = []
else:
    ext = Extension(
        "sari_sim.kernels._core",
        ["src/sari_sim/kernels/_core.pyx"],
        extra_compile_args=["-O3", "-ffp-contract=off"],
    )
    ext.optional = True
    ext_modules = cythonize([ext], language_level=3)

setup(ext_modules=ext_modules)
