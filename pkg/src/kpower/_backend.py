"""Kernel backend chosen once at import: compiled if available, else numpy."""
from . import _pykernels

try:
    from . import _ckernels as kernels
except ImportError:  # extension not built
    kernels = _pykernels
    BACKEND = "python"
else:
    BACKEND = "cython"

BACKENDS = {"python": _pykernels}
if BACKEND == "cython":
    BACKENDS["cython"] = kernels
