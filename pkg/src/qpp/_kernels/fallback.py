"""NumPy implementations of the amplitude kernels.

Used whenever the compiled extension is unavailable (or QPP_PURE_PYTHON=1).
All kernels take a contiguous complex128 vector of length 2**n and return a
fresh array; inputs are never mutated.
"""

import math

import numpy as np

_INV_SQRT2 = 1.0 / math.sqrt(2.0)


def hadamard_layer(vec):
    """Apply the single-qubit Hadamard to every qubit (butterfly per axis)."""
    out = vec.copy()
    n = out.size.bit_length() - 1
    for q in range(n):
        view = out.reshape(-1, 2, 1 << q)
        hi = view[:, 0, :].copy()
        lo = view[:, 1, :]
        view[:, 0, :] = (hi + lo) * _INV_SQRT2
        view[:, 1, :] = (hi - lo) * _INV_SQRT2
    return out


def phase_flip(vec, table):
    """Negate the amplitudes at indices where the 0/1 table is 1."""
    return vec * (1.0 - 2.0 * table)


def invert_about_mean(vec):
    """Reflect every amplitude about the mean: x -> 2*mean - x."""
    return 2.0 * vec.mean() - vec


def grover_iteration(vec, solution):
    """Fused phase flip at one index followed by inversion about the mean."""
    out = vec.copy()
    out[solution] = -out[solution]
    return 2.0 * out.mean() - out


def assert_kernel_input(vec):
    """Shared precondition used by both backends' callers."""
    assert vec.dtype == np.complex128 and vec.flags.c_contiguous
