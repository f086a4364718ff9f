"""Structured operators: factories, composition, dense cross-checks."""

import math
import random

import numpy as np
import numpy.testing as npt
import pytest

from qpp.errors import CapacityError, DomainError, ValidationError
from qpp.qops import (
    DENSE_MAX_QUBITS,
    Operator,
    adjoint,
    apply,
    compose,
    dense_operator,
    hadamard_all,
    identity,
    inversion_about_mean,
    is_unitary,
    phase_oracle,
    tensor_op,
    to_dense,
)
from qpp.qstate import QuantumState, basis_ket, state_approx_eq

INV_SQRT2 = 1.0 / math.sqrt(2.0)


def uniform_state(n):
    return apply(hadamard_all(n), basis_ket(0, n))


def random_state(rng, n):
    raw = np.array([complex(rng.gauss(0, 1), rng.gauss(0, 1))
                    for _ in range(1 << n)])
    return QuantumState(raw / np.linalg.norm(raw))


def test_hadamard_on_basis_states():
    # H|0> = (|0> + |1>)/sqrt(2) and H|1> = (|0> - |1>)/sqrt(2)
    plus = apply(hadamard_all(1), basis_ket(0, 1))
    minus = apply(hadamard_all(1), basis_ket(1, 1))
    npt.assert_allclose(plus.amplitudes, [INV_SQRT2, INV_SQRT2], atol=1e-15)
    npt.assert_allclose(minus.amplitudes, [INV_SQRT2, -INV_SQRT2], atol=1e-15)


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_hadamard_layer_builds_uniform_superposition(n):
    psi = uniform_state(n)
    npt.assert_allclose(psi.amplitudes,
                        np.full(1 << n, (1 << n) ** -0.5), atol=1e-14)


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_hadamard_layer_is_an_involution(n):
    rng = random.Random(1000 + n)
    psi = random_state(rng, n)
    back = apply(hadamard_all(n), apply(hadamard_all(n), psi))
    assert state_approx_eq(back, psi, 1e-12)


def test_phase_oracle_flips_marked_signs():
    # |x> -> (-1)^f(x) |x> entrywise
    table = (0, 1, 1, 0)
    psi = uniform_state(2)
    flipped = apply(phase_oracle(table), psi)
    expected = [0.5, -0.5, -0.5, 0.5]
    npt.assert_allclose(flipped.amplitudes, expected, atol=1e-15)


def test_phase_oracle_point_function_flips_one_entry():
    flipped = apply(phase_oracle((0, 0, 1, 0)), uniform_state(2))
    npt.assert_allclose(flipped.amplitudes, [0.5, 0.5, -0.5, 0.5], atol=1e-15)


def test_phase_oracle_validation():
    with pytest.raises(DomainError):
        phase_oracle((0, 1, 2, 0))
    with pytest.raises(DomainError):
        phase_oracle((0, 1, 1))
    with pytest.raises(DomainError):
        phase_oracle(())


def test_inversion_about_mean_on_a_basis_state():
    # frozen by hand: mean of (1,0,0,0) is 1/4, so 2m - a = (-1/2, 1/2, 1/2, 1/2)
    out = apply(inversion_about_mean(2), basis_ket(0, 2))
    npt.assert_array_equal(out.amplitudes,
                           np.array([-0.5, 0.5, 0.5, 0.5], dtype=complex))


def test_flip_then_invert_concentrates_on_the_marked_entry():
    # frozen by hand: on the exactly-uniform 2-qubit state with entry 2
    # marked, one round maps (.5,.5,-.5,.5) to exactly (0,0,1,0) — every
    # intermediate is dyadic, so no rounding occurs on either backend
    exact_uniform = QuantumState((0.5, 0.5, 0.5, 0.5))
    step = compose(inversion_about_mean(2), phase_oracle((0, 0, 1, 0)))
    out = apply(step, exact_uniform)
    npt.assert_array_equal(out.amplitudes,
                           np.array([0, 0, 1, 0], dtype=complex))
    # through the H-built uniform state the same round is exact to one ulp
    via_layer = apply(step, uniform_state(2))
    npt.assert_allclose(via_layer.amplitudes, [0, 0, 1, 0], atol=1e-15)


def test_compose_applies_right_factor_first():
    # compose(H, Uf)|0> = H(Uf|0>) = H|0> since Uf fixes |0>; the other order
    # differs, which pins the convention
    uf = phase_oracle((0, 1))
    h_after = apply(compose(hadamard_all(1), uf), basis_ket(0, 1))
    npt.assert_allclose(h_after.amplitudes, [INV_SQRT2, INV_SQRT2], atol=1e-15)
    uf_after = apply(compose(uf, hadamard_all(1)), basis_ket(0, 1))
    npt.assert_allclose(uf_after.amplitudes, [INV_SQRT2, -INV_SQRT2],
                        atol=1e-15)


def test_compose_flattens_nested_factors():
    h = hadamard_all(1)
    chain = compose(compose(h, h), compose(h, h))
    assert chain.form == "compose"
    assert len(chain.payload) == 4


def test_hadamard_composed_with_itself_is_identity():
    for n in (1, 2, 3):
        mat = to_dense(compose(hadamard_all(n), hadamard_all(n)))
        npt.assert_allclose(mat, np.eye(1 << n), atol=1e-12)


def test_adjoint_fixes_self_adjoint_forms():
    for op in (identity(2), hadamard_all(2), phase_oracle((0, 1, 1, 0)),
               inversion_about_mean(2)):
        npt.assert_allclose(to_dense(adjoint(op)), to_dense(op), atol=0)


def test_adjoint_reverses_composition():
    u = compose(hadamard_all(1), phase_oracle((0, 1)))
    npt.assert_allclose(to_dense(adjoint(u)),
                        to_dense(u).conj().T, atol=1e-14)


def test_adjoint_of_dense_operator():
    mat = np.array([[0, 1j], [1, 0]], dtype=complex)
    u = dense_operator(mat)
    npt.assert_allclose(to_dense(adjoint(u)), mat.conj().T, atol=0)


def test_tensor_op_places_first_factor_on_high_bits():
    # (H (x) I)|00> = (|00> + |10>)/sqrt(2)
    u = tensor_op(hadamard_all(1), identity(1))
    out = apply(u, basis_ket(0, 2))
    npt.assert_allclose(out.amplitudes, [INV_SQRT2, 0.0, INV_SQRT2, 0.0],
                        atol=1e-15)


def test_tensor_of_single_qubit_hadamards_matches_the_layer():
    u = tensor_op(hadamard_all(1), hadamard_all(1))
    npt.assert_allclose(to_dense(u), to_dense(hadamard_all(2)), atol=1e-14)
    rng = random.Random(7)
    psi = random_state(rng, 2)
    assert state_approx_eq(apply(u, psi), apply(hadamard_all(2), psi), 1e-12)


def test_apply_requires_matching_register_sizes():
    with pytest.raises(DomainError):
        apply(hadamard_all(2), basis_ket(0, 1))


def test_dense_operator_validation():
    with pytest.raises(ValidationError):
        dense_operator([[1.0, 0.0], [0.0, 2.0]])
    with pytest.raises(DomainError):
        dense_operator([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]])
    skewed = dense_operator([[1.0, 0.0], [0.0, 2.0]], validate=False)
    assert not is_unitary(skewed)


def test_dense_capacity_cap():
    with pytest.raises(CapacityError):
        to_dense(hadamard_all(DENSE_MAX_QUBITS + 1))
    with pytest.raises(CapacityError):
        is_unitary(hadamard_all(DENSE_MAX_QUBITS + 1))


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_structured_forms_are_unitary(n):
    table = [1 if x % 3 == 0 else 0 for x in range(1 << n)]
    for op in (identity(n), hadamard_all(n), phase_oracle(table),
               inversion_about_mean(n)):
        assert is_unitary(op, tol=1e-10)


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_structured_apply_matches_dense_matrix(n):
    rng = random.Random(3000 + n)
    table = tuple(rng.randint(0, 1) for _ in range(1 << n))
    ops = [identity(n), hadamard_all(n), phase_oracle(table),
           inversion_about_mean(n),
           compose(inversion_about_mean(n), phase_oracle(table)),
           adjoint(compose(hadamard_all(n), phase_oracle(table)))]
    if n >= 2:
        ops.append(tensor_op(hadamard_all(1), identity(n - 1)))
    for op in ops:
        psi = random_state(rng, n)
        structured = apply(op, psi).amplitudes
        dense = to_dense(op) @ psi.amplitudes
        npt.assert_allclose(structured, dense, atol=1e-10)


def test_operators_are_immutable():
    op = identity(1)
    with pytest.raises(AttributeError):
        op.form = "dense"


def test_register_size_bounds():
    with pytest.raises(CapacityError):
        hadamard_all(0)
    with pytest.raises(CapacityError):
        inversion_about_mean(13)
    with pytest.raises(CapacityError):
        tensor_op(hadamard_all(7), hadamard_all(6))
    with pytest.raises(DomainError):
        compose(hadamard_all(1), hadamard_all(2))
