"""Dense register states: unit-norm complex amplitude vectors.

A state over n qubits is a vector of 2**n complex128 amplitudes indexed by
basis integers 0,..2**n. Equality of states is componentwise on amplitudes —
two vectors differing by a global phase are different states here, on purpose:
states are compared as program values, not as physical rays.
"""

from __future__ import annotations

import numbers

import numpy as np

from .errors import CapacityError, DomainError, ValidationError

MAX_QUBITS = 12
NORM_TOL = 1e-9


class QuantumState:
    """Immutable amplitude vector for a register of `n_qubits` qubits."""

    __slots__ = ("n_qubits", "amplitudes")

    def __init__(self, amplitudes):
        arr = np.array(amplitudes, dtype=np.complex128, order="C")
        if arr.ndim != 1:
            raise DomainError("amplitudes must be a one-dimensional vector")
        size = arr.size
        n = size.bit_length() - 1
        if size == 0 or (1 << n) != size:
            raise DomainError(f"amplitude count must be a power of two, got {size}")
        if not 1 <= n <= MAX_QUBITS:
            raise CapacityError(f"register size must be in 1..{MAX_QUBITS}, got {n}")
        if not np.all(np.isfinite(arr.view(np.float64))):
            raise ValidationError("amplitudes must be finite")
        norm_sq = float(np.vdot(arr, arr).real)
        if abs(norm_sq - 1.0) > NORM_TOL:
            raise ValidationError(
                f"state is not normalized: sum of |amplitude|^2 = {norm_sq!r}")
        arr.setflags(write=False)
        object.__setattr__(self, "n_qubits", n)
        object.__setattr__(self, "amplitudes", arr)

    def __setattr__(self, name, value):
        raise AttributeError("QuantumState is immutable")

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    def __getitem__(self, x: int) -> complex:
        return complex(self.amplitudes[x])

    def __repr__(self) -> str:
        return f"QuantumState(n_qubits={self.n_qubits}, amplitudes={self.amplitudes!r})"

    def grid_key(self, grid: float = 1e-10) -> tuple:
        """Hashable key with both components rounded to the given grid."""
        scaled = np.round(self.amplitudes.view(np.float64) / grid)
        return tuple(scaled.astype(np.int64).tolist())


def basis_ket(x: int, n: int) -> QuantumState:
    """The computational-basis state |x> on an n-qubit register."""
    if not isinstance(n, numbers.Integral) or n < 1 or n > MAX_QUBITS:
        raise CapacityError(f"register size must be in 1..{MAX_QUBITS}, got {n!r}")
    if not isinstance(x, numbers.Integral) or x < 0 or x >= (1 << n):
        raise DomainError(f"basis index {x!r} out of range for {n} qubits")
    amp = np.zeros(1 << n, dtype=np.complex128)
    amp[x] = 1.0
    return QuantumState(amp)


def inner_product(psi: QuantumState, phi: QuantumState) -> complex:
    """<psi|phi> — conjugate-linear in the first argument."""
    if psi.n_qubits != phi.n_qubits:
        raise DomainError("inner product requires states on the same register size")
    return complex(np.vdot(psi.amplitudes, phi.amplitudes))


def tensor(psi: QuantumState, phi: QuantumState) -> QuantumState:
    """Tensor product; the first factor occupies the high-order index bits."""
    m, n = psi.n_qubits, phi.n_qubits
    if m + n > MAX_QUBITS:
        raise CapacityError(f"tensor product would need {m + n} qubits (max {MAX_QUBITS})")
    return QuantumState(np.kron(psi.amplitudes, phi.amplitudes))


def state_approx_eq(psi: QuantumState, phi: QuantumState, tol: float) -> bool:
    """Componentwise comparison: max |psi_x - phi_x| <= tol."""
    if not (isinstance(tol, numbers.Real) and tol > 0):
        raise DomainError(f"tolerance must be positive, got {tol!r}")
    if psi.n_qubits != phi.n_qubits:
        raise DomainError("cannot compare states on different register sizes")
    return bool(np.max(np.abs(psi.amplitudes - phi.amplitudes)) <= tol)
