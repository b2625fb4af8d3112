import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from varqite_maxwell.quantum_core import (
    CNOT, CRY, RY, Gate, Hadamard, InvalidGateError, PauliParseError, Phase, PauliWord, SdgH,
    StateVector, apply_circuit, apply_controlled, apply_gate, apply_pauli_word, circuit_matrix,
    gate_matrix, inner_product, pauli_matrix,
)


def _random_state(n, seed):
    rng = np.random.default_rng(seed)
    v = rng.normal(size=2**n) + 1j * rng.normal(size=2**n)
    return StateVector(n, v / np.linalg.norm(v))


def test_cnot_truth_table():
    # qubit 0 is the low bit: |q0=1, q1=0> is index 1
    out = apply_gate(StateVector.basis(2, 1), CNOT(0, 1))
    np.testing.assert_allclose(out.amplitudes, StateVector.basis(2, 3).amplitudes)
    out = apply_gate(StateVector.basis(2, 2), CNOT(0, 1))
    np.testing.assert_allclose(out.amplitudes, StateVector.basis(2, 2).amplitudes)


def test_ry_pi_flips_with_positive_amplitude():
    out = apply_gate(StateVector.zero(1), RY(np.pi, 0))
    np.testing.assert_allclose(out.amplitudes, [0, 1], atol=1e-15)


def test_cry_control_off_is_identity():
    psi = _random_state(1, 0)
    # control qubit 0 in |0>, target qubit 1 carries psi
    amps = np.kron(psi.amplitudes, [1, 0])
    out = apply_gate(StateVector(2, amps), CRY(0.7, 0, 1))
    np.testing.assert_allclose(out.amplitudes, amps)


def test_cry_control_on_rotates_target():
    out = apply_gate(StateVector.basis(2, 1), CRY(0.9, 0, 1))
    expected = np.zeros(4)
    expected[1], expected[3] = np.cos(0.45), np.sin(0.45)
    np.testing.assert_allclose(out.amplitudes, expected, atol=1e-15)


def test_pauli_word_examples():
    np.testing.assert_allclose(apply_pauli_word(StateVector.zero(1), "X").amplitudes, [0, 1])
    np.testing.assert_allclose(apply_pauli_word(StateVector.basis(2, 3), "ZZ").amplitudes, [0, 0, 0, 1])
    np.testing.assert_allclose(apply_pauli_word(StateVector.zero(1), "Y").amplitudes, [0, 1j])


def test_pauli_word_character_acts_on_its_qubit():
    out = apply_pauli_word(StateVector.zero(3), "IXI")
    np.testing.assert_allclose(out.amplitudes, StateVector.basis(3, 2).amplitudes)


def test_pauli_parse_errors():
    with pytest.raises(PauliParseError):
        apply_pauli_word(StateVector.zero(2), "XQ")
    with pytest.raises(PauliParseError):
        apply_pauli_word(StateVector.zero(2), "X")


def test_invalid_gate_qubit():
    with pytest.raises(InvalidGateError):
        apply_gate(StateVector.zero(2), RY(0.1, 2))
    with pytest.raises(InvalidGateError):
        apply_gate(StateVector.zero(2), CNOT(1, 1))


def test_inner_products():
    zero, one = StateVector.zero(1), StateVector.basis(1, 1)
    plus = apply_gate(zero, Hadamard(0))
    assert inner_product(zero, zero) == pytest.approx(1)
    assert inner_product(zero, one) == pytest.approx(0)
    assert inner_product(plus, zero) == pytest.approx(1 / np.sqrt(2))


def test_apply_controlled_branches():
    # system qubit 0, ancilla qubit 1
    off = apply_controlled(StateVector.basis(2, 0), [PauliWord("XI")], ancilla=1)
    np.testing.assert_allclose(off.amplitudes, [1, 0, 0, 0])
    on = apply_controlled(StateVector.basis(2, 2), [PauliWord("XI")], ancilla=1)
    np.testing.assert_allclose(on.amplitudes, [0, 0, 0, 1])


def test_apply_controlled_hadamard_interference():
    # ancilla |+>, controlled Z on |+>: <X_ancilla> = Re<+|Z|+> = 0
    s = apply_circuit(StateVector.zero(2), [Hadamard(0), Hadamard(1)])
    s = apply_controlled(s, [PauliWord("ZI")], ancilla=1)
    x_anc = inner_product(s, apply_pauli_word(s, "IX")).real
    assert x_anc == pytest.approx(0, abs=1e-15)


def test_apply_controlled_rejects_overlap():
    with pytest.raises(InvalidGateError):
        apply_controlled(StateVector.zero(2), [RY(0.3, 1)], ancilla=1)


def test_sdg_h_maps_y_eigenstate_to_zero():
    # |+i> = (|0> + i|1>)/sqrt(2)
    s = StateVector(1, np.array([1, 1j]) / np.sqrt(2))
    np.testing.assert_allclose(np.abs(apply_gate(s, SdgH(0)).amplitudes), [1, 0], atol=1e-15)


def test_statevector_is_immutable():
    s = StateVector.zero(2)
    with pytest.raises(ValueError):
        s.amplitudes[0] = 2


GATES = st.one_of(
    st.builds(lambda a, q: RY(a, q), st.floats(-7, 7), st.integers(0, 2)),
    st.builds(lambda a, c, d: CRY(a, c, (c + d) % 3), st.floats(-7, 7), st.integers(0, 2), st.integers(1, 2)),
    st.builds(lambda c, d: CNOT(c, (c + d) % 3), st.integers(0, 2), st.integers(1, 2)),
    st.builds(lambda a, q: Phase(a, q), st.floats(-7, 7), st.integers(0, 2)),
    st.builds(Hadamard, st.integers(0, 2)),
    st.builds(PauliWord, st.text("IXYZ", min_size=3, max_size=3)),
)


@settings(max_examples=60, deadline=None)
@given(st.lists(GATES, min_size=1, max_size=6), st.integers(0, 1000))
def test_kernels_match_dense_matrices(gates, seed):
    psi = _random_state(3, seed)
    out = apply_circuit(psi, gates)
    np.testing.assert_allclose(out.amplitudes, circuit_matrix(gates, 3) @ psi.amplitudes, atol=1e-12)
    assert out.is_normalized(1e-12)


@settings(max_examples=40, deadline=None)
@given(GATES, st.integers(0, 1), st.integers(0, 1000))
def test_ancilla_controlled_gate_matches_projector_form(gate, branch, seed):
    g = gate.with_control(3, branch)
    psi = _random_state(4, seed)
    proj = np.diag([1, 0]) if branch == 0 else np.diag([0, 1])
    other = np.eye(2) - proj
    dense = np.kron(proj, gate_matrix(gate, 3)) + np.kron(other, np.eye(8))
    np.testing.assert_allclose(apply_gate(psi, g).amplitudes, dense @ psi.amplitudes, atol=1e-12)


def test_pauli_matrix_kron_order():
    x, z = pauli_matrix("X"), pauli_matrix("Z")
    np.testing.assert_allclose(pauli_matrix("XZ"), np.kron(z, x))


def test_gate_dataclass_rejects_unknown_kind():
    with pytest.raises(InvalidGateError):
        apply_gate(StateVector.zero(1), Gate("rx", (0,), 0.1))
