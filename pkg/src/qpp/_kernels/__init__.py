"""Hot amplitude kernels with a compiled core and a NumPy fallback.

The compiled extension (Cython) is preferred when importable; setting
QPP_PURE_PYTHON=1 in the environment forces the fallback. BACKEND names the
selection so callers and benchmarks can report it.
"""

import os

from . import fallback

if os.environ.get("QPP_PURE_PYTHON"):
    _impl = fallback
    BACKEND = "python"
else:
    try:
        from . import _core as _impl
        BACKEND = "compiled"
    except ImportError:
        _impl = fallback
        BACKEND = "python"

hadamard_layer = _impl.hadamard_layer
phase_flip = _impl.phase_flip
invert_about_mean = _impl.invert_about_mean
grover_iteration = _impl.grover_iteration

__all__ = ["BACKEND", "hadamard_layer", "phase_flip", "invert_about_mean",
           "grover_iteration", "fallback"]
