"""The four measurement forms, all reducing to outcome/post-state/probability.

General collections {M_m}, observables (eigenvalue/projector pairs), orthonormal
bases, and the computational basis. Outcomes are natural numbers 0,..2**n (the
outcome index); entries with probability <= PROB_EPS are dropped. Collections
and observables carry explicit dense matrices and are meant for test-scale
registers; the computational form works at full register capacity.
"""

from __future__ import annotations

import numbers
from dataclasses import dataclass

import numpy as np

from .errors import CapacityError, DomainError, ValidationError
from .qstate import QuantumState, basis_ket

PROB_EPS = 1e-12
COMPLETENESS_TOL = 1e-9
DENSE_MEASURE_MAX_QUBITS = 6


def _as_square_matrix(m, size, what):
    mat = np.array(m, dtype=np.complex128)
    if mat.shape != (size, size):
        raise DomainError(f"{what} must be a {size}x{size} matrix, got shape {mat.shape}")
    mat.setflags(write=False)
    return mat


def _check_dense_register(n):
    if not isinstance(n, numbers.Integral) or not 1 <= n <= DENSE_MEASURE_MAX_QUBITS:
        raise CapacityError(
            f"dense measurements support 1..{DENSE_MEASURE_MAX_QUBITS} qubits, got {n!r}")
    return int(n)


class MeasurementCollection:
    """Operators {M_m} indexed by outcome, zero-padded to all 2**n outcomes.

    Completeness (sum of M†M = identity within 1e-9) is checked at
    construction; anything else is rejected up front rather than mid-run.
    """

    __slots__ = ("n_qubits", "operators")

    def __init__(self, n_qubits, operators):
        n = _check_dense_register(n_qubits)
        size = 1 << n
        ops = [_as_square_matrix(m, size, "measurement operator") for m in operators]
        if len(ops) > size:
            raise DomainError(f"at most {size} outcomes for {n} qubits, got {len(ops)}")
        zero = np.zeros((size, size), dtype=np.complex128)
        zero.setflags(write=False)
        while len(ops) < size:
            ops.append(zero)
        total = sum(m.conj().T @ m for m in ops)
        if np.max(np.abs(total - np.eye(size))) > COMPLETENESS_TOL:
            raise ValidationError("measurement collection is not complete: sum M†M != I")
        self.n_qubits = n
        self.operators = tuple(ops)


class Observable:
    """Eigenvalue/projector pairs; outcome m is the index of the pair."""

    __slots__ = ("n_qubits", "eigenvalues", "projectors")

    def __init__(self, n_qubits, eigenpairs):
        n = _check_dense_register(n_qubits)
        size = 1 << n
        values, projectors = [], []
        for value, proj in eigenpairs:
            values.append(float(value))
            projectors.append(_as_square_matrix(proj, size, "projector"))
        if len(set(values)) != len(values):
            raise ValidationError("observable eigenvalues must be distinct")
        for i, p in enumerate(projectors):
            if np.max(np.abs(p @ p - p)) > COMPLETENESS_TOL:
                raise ValidationError(f"projector {i} is not idempotent")
            if np.max(np.abs(p - p.conj().T)) > COMPLETENESS_TOL:
                raise ValidationError(f"projector {i} is not hermitian")
            for j in range(i):
                if np.max(np.abs(projectors[j] @ p)) > COMPLETENESS_TOL:
                    raise ValidationError(f"projectors {j} and {i} are not orthogonal")
        total = sum(projectors)
        if np.max(np.abs(total - np.eye(size))) > COMPLETENESS_TOL:
            raise ValidationError("projectors do not sum to the identity")
        self.n_qubits = n
        self.eigenvalues = tuple(values)
        self.projectors = tuple(projectors)


@dataclass(frozen=True)
class MeasurementOutcome:
    outcome: int
    state: QuantumState
    probability: float


class MeasurementOutcomeDist:
    """Sparse outcome distribution over 0,..n_outcomes."""

    __slots__ = ("n_outcomes", "entries")

    def __init__(self, n_outcomes, entries):
        self.n_outcomes = n_outcomes
        self.entries = tuple(sorted(entries, key=lambda e: e.outcome))

    def probabilities(self) -> np.ndarray:
        """Dense probability vector, zero-padded over the full outcome range."""
        probs = np.zeros(self.n_outcomes)
        for e in self.entries:
            probs[e.outcome] = e.probability
        return probs

    def total(self) -> float:
        return float(sum(e.probability for e in self.entries))


def _collect(n_outcomes, raw):
    entries = [MeasurementOutcome(m, state, p)
               for m, state, p in raw if p > PROB_EPS]
    return MeasurementOutcomeDist(n_outcomes, entries)


def measure_computational(psi: QuantumState) -> MeasurementOutcomeDist:
    """Outcome x with probability |psi_x|^2; post-state |x>."""
    probs = np.abs(psi.amplitudes) ** 2
    raw = [(x, basis_ket(x, psi.n_qubits), float(p))
           for x, p in enumerate(probs) if p > PROB_EPS]
    return _collect(psi.dim, raw)


def measure_general(collection: MeasurementCollection,
                    psi: QuantumState) -> MeasurementOutcomeDist:
    """Outcome m with probability <psi|M†M psi>; post-state M psi normalized."""
    if collection.n_qubits != psi.n_qubits:
        raise DomainError("measurement and state register sizes differ")
    raw = []
    for m, op in enumerate(collection.operators):
        vec = op @ psi.amplitudes
        p = float(np.vdot(vec, vec).real)
        if p > PROB_EPS:
            raw.append((m, QuantumState(vec / np.sqrt(p)), p))
    return _collect(psi.dim, raw)


def measure_observable(obs: Observable, psi: QuantumState) -> MeasurementOutcomeDist:
    """Outcome m (eigenvalue index) with probability <psi|P_m psi>."""
    if obs.n_qubits != psi.n_qubits:
        raise DomainError("observable and state register sizes differ")
    raw = []
    for m, proj in enumerate(obs.projectors):
        vec = proj @ psi.amplitudes
        p = float(np.vdot(psi.amplitudes, vec).real)
        if p > PROB_EPS:
            raw.append((m, QuantumState(vec / np.sqrt(p)), p))
    return _collect(psi.dim, raw)


def measure_in_basis(basis, psi: QuantumState) -> MeasurementOutcomeDist:
    """Outcome r with probability |<b_r|psi>|^2; post-state b_r."""
    basis = tuple(basis)
    size = psi.dim
    if len(basis) != size:
        raise DomainError(f"basis must list {size} states, got {len(basis)}")
    _check_dense_register(psi.n_qubits)
    mat = np.stack([b.amplitudes for b in basis])
    if any(b.n_qubits != psi.n_qubits for b in basis):
        raise DomainError("basis states must match the measured register size")
    gram = mat.conj() @ mat.T
    if np.max(np.abs(gram - np.eye(size))) > COMPLETENESS_TOL:
        raise ValidationError("basis is not orthonormal within tolerance")
    amps = mat.conj() @ psi.amplitudes
    raw = [(r, basis[r], float(abs(a) ** 2))
           for r, a in enumerate(amps) if abs(a) ** 2 > PROB_EPS]
    return _collect(size, raw)
