"""Unitary operators on register states, kept in structured form.

An Operator is one of: identity, whole-register Hadamard layer, phase oracle
(diagonal +-1 from a 0/1 truth table), inversion about the mean, an explicit
dense matrix, a composition (mathematical order: compose(U, V) applies V
first), or a tensor product (first factor on the high-order index bits).
Structured forms apply in O(2**n) or O(n 2**n) through the kernel layer and
never materialize a matrix; dense materialization exists for testing and is
capacity-capped.
"""

from __future__ import annotations

import math
import numbers

import numpy as np

from . import _kernels
from .errors import CapacityError, DomainError, ValidationError
from .qstate import MAX_QUBITS, QuantumState

UNITARY_TOL = 1e-9
DENSE_MAX_QUBITS = 8


class Operator:
    """A unitary on n qubits; construct via the module-level factories."""

    __slots__ = ("n_qubits", "form", "payload")

    def __init__(self, n_qubits, form, payload=None):
        object.__setattr__(self, "n_qubits", n_qubits)
        object.__setattr__(self, "form", form)
        object.__setattr__(self, "payload", payload)

    def __setattr__(self, name, value):
        raise AttributeError("Operator is immutable")

    def __repr__(self):
        return f"Operator({self.form}, n_qubits={self.n_qubits})"


def _check_register_size(n):
    if not isinstance(n, numbers.Integral) or not 1 <= n <= MAX_QUBITS:
        raise CapacityError(f"register size must be in 1..{MAX_QUBITS}, got {n!r}")
    return int(n)


def identity(n: int) -> Operator:
    return Operator(_check_register_size(n), "identity")


def hadamard_all(n: int) -> Operator:
    """The Hadamard applied to each of the n qubits."""
    return Operator(_check_register_size(n), "hadamard")


def phase_oracle(table) -> Operator:
    """Diagonal operator |x> -> (-1)^f(x) |x> for a 0/1 truth table f."""
    arr = np.asarray(table)
    if arr.ndim != 1 or arr.size == 0:
        raise DomainError("oracle table must be a non-empty vector of 0/1 entries")
    if not np.isin(arr, (0, 1)).all():
        raise DomainError("oracle table entries must be 0 or 1")
    n = arr.size.bit_length() - 1
    if (1 << n) != arr.size:
        raise DomainError(f"oracle table length must be a power of two, got {arr.size}")
    _check_register_size(n)
    arr = arr.astype(np.int8)
    arr.setflags(write=False)
    return Operator(n, "oracle", arr)


def inversion_about_mean(n: int) -> Operator:
    """x -> 2*mean(x) - x on every amplitude (real, symmetric, unitary)."""
    return Operator(_check_register_size(n), "invmean")


def dense_operator(matrix, validate: bool = True) -> Operator:
    """Wrap an explicit 2**n x 2**n matrix; unitarity checked unless disabled."""
    mat = np.array(matrix, dtype=np.complex128)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise DomainError("dense operator requires a square matrix")
    n = mat.shape[0].bit_length() - 1
    if (1 << n) != mat.shape[0]:
        raise DomainError(f"matrix dimension must be a power of two, got {mat.shape[0]}")
    if not 1 <= n <= DENSE_MAX_QUBITS:
        raise CapacityError(
            f"dense operators support 1..{DENSE_MAX_QUBITS} qubits, got {n}")
    mat.setflags(write=False)
    op = Operator(n, "dense", mat)
    if validate and not is_unitary(op):
        raise ValidationError("matrix is not unitary within tolerance")
    return op


def compose(u: Operator, v: Operator) -> Operator:
    """compose(U, V) denotes U after V: apply(compose(U, V), psi) = U(V(psi))."""
    if u.n_qubits != v.n_qubits:
        raise DomainError("composition requires equal register sizes")
    factors = []
    for op in (u, v):
        factors.extend(op.payload if op.form == "compose" else (op,))
    return Operator(u.n_qubits, "compose", tuple(factors))


def tensor_op(u: Operator, v: Operator) -> Operator:
    """Tensor product; u acts on the high-order index bits."""
    n = u.n_qubits + v.n_qubits
    if n > MAX_QUBITS:
        raise CapacityError(f"tensor product would need {n} qubits (max {MAX_QUBITS})")
    return Operator(n, "tensor", (u, v))


def adjoint(u: Operator) -> Operator:
    """Conjugate transpose, staying in structured form where possible."""
    if u.form in ("identity", "hadamard", "oracle", "invmean"):
        return u  # all self-adjoint
    if u.form == "dense":
        return dense_operator(u.payload.conj().T, validate=False)
    if u.form == "compose":
        rev = tuple(adjoint(f) for f in reversed(u.payload))
        return Operator(u.n_qubits, "compose", rev)
    if u.form == "tensor":
        a, b = u.payload
        return Operator(u.n_qubits, "tensor", (adjoint(a), adjoint(b)))
    raise ValidationError(f"unknown operator form {u.form!r}")


def _apply_raw(op: Operator, vec: np.ndarray) -> np.ndarray:
    """Apply to a raw amplitude vector (no normalization requirement)."""
    form = op.form
    if form == "identity":
        return vec.copy()
    if form == "hadamard":
        return _kernels.hadamard_layer(vec)
    if form == "oracle":
        return _kernels.phase_flip(vec, op.payload)
    if form == "invmean":
        return _kernels.invert_about_mean(vec)
    if form == "dense":
        return op.payload @ vec
    if form == "compose":
        out = vec
        for factor in reversed(op.payload):
            out = _apply_raw(factor, out)
        return out
    if form == "tensor":
        u, v = op.payload
        rows, cols = 1 << u.n_qubits, 1 << v.n_qubits
        mat = vec.reshape(rows, cols)
        mat = np.stack([_apply_raw(v, np.ascontiguousarray(row)) for row in mat])
        mat = np.stack(
            [_apply_raw(u, np.ascontiguousarray(mat[:, b])) for b in range(cols)],
            axis=1)
        return mat.reshape(rows * cols)
    raise ValidationError(f"unknown operator form {form!r}")


def apply(u: Operator, psi: QuantumState) -> QuantumState:
    """U psi. The result is re-validated, so norm drift past 1e-9 would raise."""
    if u.n_qubits != psi.n_qubits:
        raise DomainError(
            f"operator on {u.n_qubits} qubits cannot act on {psi.n_qubits}-qubit state")
    return QuantumState(_apply_raw(u, psi.amplitudes))


def to_dense(u: Operator) -> np.ndarray:
    """Materialize the matrix (testing aid; capacity-capped)."""
    n = u.n_qubits
    if n > DENSE_MAX_QUBITS:
        raise CapacityError(
            f"dense materialization supports up to {DENSE_MAX_QUBITS} qubits, got {n}")
    size = 1 << n
    form = u.form
    if form == "identity":
        return np.eye(size, dtype=np.complex128)
    if form == "hadamard":
        h1 = np.array([[1.0, 1.0], [1.0, -1.0]], dtype=np.complex128) / math.sqrt(2.0)
        out = np.array([[1.0]], dtype=np.complex128)
        for _ in range(n):
            out = np.kron(out, h1)
        return out
    if form == "oracle":
        return np.diag((1.0 - 2.0 * u.payload).astype(np.complex128))
    if form == "invmean":
        return 2.0 / size * np.ones((size, size), dtype=np.complex128) - np.eye(size)
    if form == "dense":
        return u.payload.copy()
    if form == "compose":
        out = np.eye(size, dtype=np.complex128)
        for factor in u.payload:
            out = out @ to_dense(factor)
        return out
    if form == "tensor":
        a, b = u.payload
        return np.kron(to_dense(a), to_dense(b))
    raise ValidationError(f"unknown operator form {form!r}")


def is_unitary(u: Operator, tol: float = UNITARY_TOL) -> bool:
    """Check U†U = I on the materialized matrix (capacity-capped at 8 qubits)."""
    if u.n_qubits > DENSE_MAX_QUBITS:
        raise CapacityError(
            f"unitarity check supports up to {DENSE_MAX_QUBITS} qubits, got {u.n_qubits}")
    mat = to_dense(u)
    gram = mat.conj().T @ mat
    return bool(np.max(np.abs(gram - np.eye(mat.shape[0]))) <= tol)
