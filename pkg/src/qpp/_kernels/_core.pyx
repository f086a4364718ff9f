# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled amplitude kernels. Same contracts as qpp._kernels.fallback."""

from libc.math cimport sqrt

import numpy as np


def hadamard_layer(vec):
    """Apply the single-qubit Hadamard to every qubit (butterfly per axis)."""
    out = np.array(vec, dtype=np.complex128)
    cdef double complex[::1] v = out
    cdef Py_ssize_t size = v.shape[0]
    cdef Py_ssize_t h = 1
    cdef Py_ssize_t base, off
    cdef double s = 1.0 / sqrt(2.0)
    cdef double complex a, b
    while h < size:
        for base in range(0, size, 2 * h):
            for off in range(base, base + h):
                a = v[off]
                b = v[off + h]
                v[off] = (a + b) * s
                v[off + h] = (a - b) * s
        h <<= 1
    return out


def phase_flip(vec, table):
    """Negate the amplitudes at indices where the 0/1 table is 1."""
    out = np.array(vec, dtype=np.complex128)
    cdef double complex[::1] v = out
    cdef const signed char[::1] t = table
    cdef Py_ssize_t i
    for i in range(v.shape[0]):
        if t[i]:
            v[i] = -v[i]
    return out


def invert_about_mean(vec):
    """Reflect every amplitude about the mean: x -> 2*mean - x."""
    out = np.array(vec, dtype=np.complex128)
    cdef double complex[::1] v = out
    cdef Py_ssize_t size = v.shape[0]
    cdef Py_ssize_t i
    cdef double complex acc = 0
    for i in range(size):
        acc = acc + v[i]
    cdef double complex twice_mean = 2.0 * acc / size
    for i in range(size):
        v[i] = twice_mean - v[i]
    return out


def grover_iteration(vec, solution):
    """Fused phase flip at one index followed by inversion about the mean."""
    out = np.array(vec, dtype=np.complex128)
    cdef double complex[::1] v = out
    cdef Py_ssize_t size = v.shape[0]
    cdef Py_ssize_t sol = solution
    cdef Py_ssize_t i
    cdef double complex acc = 0
    v[sol] = -v[sol]
    for i in range(size):
        acc = acc + v[i]
    cdef double complex twice_mean = 2.0 * acc / size
    for i in range(size):
        v[i] = twice_mean - v[i]
    return out
