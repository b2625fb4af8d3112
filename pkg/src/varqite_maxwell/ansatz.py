"""TwoLocal ansatz families built from RY, CRY and CNOT gates.

Parameter counts per family (``N`` qubits, ``L`` layers):

=============  =====================
Ry-Linear      ``L * N``
Ry-Full        ``L * N``
RyCRy-Linear   ``(L + N - 1) * N``
RyCRy-Full     ``(L + C(N, 2)) * N``
=============  =====================

The Ry families are ``L`` repetitions of an RY column followed by a CNOT
entangler. The RyCRy families contain ``L`` RY columns and ``N`` CRY
entangler blocks; the columns are spread evenly so that the circuit both
starts and (for ``L > 1``) ends with a rotation column. Parameters are
numbered in circuit order.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from math import comb

import numpy as np

from .quantum_core import CNOT, CRY, RY, Gate, PauliTerm, StateVector, apply_gate_array

FAMILIES = ("Ry-Linear", "Ry-Full", "RyCRy-Linear", "RyCRy-Full")


@dataclass(frozen=True)
class AnsatzSpec:
    family: str
    n_qubits: int
    layers: int = 1

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown ansatz family {self.family!r}; choose from {FAMILIES}")
        if self.layers < 1:
            raise ValueError("layers must be >= 1")
        if self.n_qubits < 1:
            raise ValueError("n_qubits must be >= 1")

    @property
    def entanglement(self) -> str:
        return self.family.split("-")[1].lower()

    @property
    def controlled_rotations(self) -> bool:
        return self.family.startswith("RyCRy")


@dataclass(frozen=True)
class GateSequence:
    """Circuit template; ``slots[i]`` is the position of the gate carrying parameter ``i``."""

    n_qubits: int
    gates: tuple[Gate, ...]
    slots: tuple[int, ...]

    @property
    def n_params(self) -> int:
        return len(self.slots)

    def bind(self, theta) -> list[Gate]:
        theta = np.asarray(theta, dtype=float)
        if theta.shape != (self.n_params,):
            raise ValueError(f"expected {self.n_params} parameters, got shape {theta.shape}")
        gates = list(self.gates)
        for i, pos in enumerate(self.slots):
            g = gates[pos]
            gates[pos] = Gate(g.kind, g.qubits, float(theta[i]))
        return gates


def entangling_pairs(n_qubits: int, entanglement: str) -> list[tuple[int, int]]:
    if entanglement == "linear":
        return [(q, q + 1) for q in range(n_qubits - 1)]
    return list(itertools.combinations(range(n_qubits), 2))


def _block_order(layers: int, n_blocks: int) -> list[str]:
    # RY column j sits at j / (L - 1), CRY block m at (m + 1) / (N + 1); ties go to RY
    keys = [(0.0 if layers == 1 else j / (layers - 1), 0, "rot") for j in range(layers)]
    keys += [((m + 1) / (n_blocks + 1), 1, "ent") for m in range(n_blocks)]
    return [k[2] for k in sorted(keys)]


def param_count(spec: AnsatzSpec) -> int:
    n, L = spec.n_qubits, spec.layers
    if not spec.controlled_rotations:
        return L * n
    per_block = n - 1 if spec.entanglement == "linear" else comb(n, 2)
    return (L + per_block) * n


@lru_cache(maxsize=256)
def build(spec: AnsatzSpec) -> GateSequence:
    n = spec.n_qubits
    pairs = entangling_pairs(n, spec.entanglement)
    gates: list[Gate] = []
    slots: list[int] = []

    def rotation_column():
        for q in range(n):
            slots.append(len(gates))
            gates.append(RY(0.0, q))

    if spec.controlled_rotations:
        for block in _block_order(spec.layers, n):
            if block == "rot":
                rotation_column()
            else:
                for c, t in pairs:
                    slots.append(len(gates))
                    gates.append(CRY(0.0, c, t))
    else:
        for _ in range(spec.layers):
            rotation_column()
            gates.extend(CNOT(c, t) for c, t in pairs)
    return GateSequence(n, tuple(gates), tuple(slots))


def as_sequence(ansatz: AnsatzSpec | GateSequence) -> GateSequence:
    """Accept either a family spec or an explicit circuit template."""
    return ansatz if isinstance(ansatz, GateSequence) else build(ansatz)


def custom_sequence(n_qubits: int, gates) -> GateSequence:
    """Template from explicit gates; every RY/CRY gate becomes a parameter slot."""
    gates = tuple(gates)
    slots = tuple(k for k, g in enumerate(gates) if g.kind in ("ry", "cry"))
    return GateSequence(n_qubits, gates, slots)


def bound_circuit(ansatz, theta) -> list[Gate]:
    return as_sequence(ansatz).bind(theta)


def _run(gates, amps: np.ndarray, n: int) -> np.ndarray:
    for g in gates:
        amps = apply_gate_array(amps, g, n)
    return amps


def state(ansatz, theta) -> StateVector:
    """Ansatz state ``U(theta)|0...0>``."""
    seq = as_sequence(ansatz)
    amps = np.zeros(2**seq.n_qubits, dtype=complex)
    amps[0] = 1.0
    return StateVector(seq.n_qubits, _run(seq.bind(theta), amps, seq.n_qubits))


@dataclass(frozen=True)
class DerivativeTerm:
    """``dU_i/dtheta_i = sum_k a_k U_i sigma_k``; ``sigma_k`` is inserted just before gate ``position``."""

    coefficient: complex
    sigma: PauliTerm
    position: int


def gate_derivative_terms(gate: Gate, n_qubits: int) -> list[tuple[complex, str]]:
    word = ["I"] * n_qubits
    if gate.kind == "ry":
        word[gate.qubits[0]] = "Y"
        return [(-0.5j, "".join(word))]
    if gate.kind == "cry":
        c, t = gate.qubits
        word[t] = "Y"
        iy = "".join(word)
        word[c] = "Z"
        zy = "".join(word)
        # |1><1| = (I - Z)/2 on the control
        return [(-0.25j, iy), (0.25j, zy)]
    raise ValueError(f"gate kind {gate.kind!r} has no parameter")


def derivative_expansion(ansatz, i: int) -> list[DerivativeTerm]:
    seq = as_sequence(ansatz)
    if not 0 <= i < seq.n_params:
        raise IndexError(f"parameter index {i} out of range for {seq.n_params} parameters")
    pos = seq.slots[i]
    return [DerivativeTerm(a, PauliTerm(1.0, w), pos)
            for a, w in gate_derivative_terms(seq.gates[pos], seq.n_qubits)]


def jacobian_states(ansatz, theta) -> np.ndarray:
    """Columns ``d|phi(theta)>/dtheta_i`` as a ``(2^n, d)`` array.

    Prefix states are shared between parameters; each column applies the
    inserted Pauli and then the remaining suffix of the circuit.
    """
    seq = as_sequence(ansatz)
    gates = seq.bind(theta)
    n = seq.n_qubits
    amps = np.zeros(2**n, dtype=complex)
    amps[0] = 1.0
    prefix = [amps]
    for g in gates:
        prefix.append(apply_gate_array(prefix[-1], g, n))

    out = np.zeros((2**n, seq.n_params), dtype=complex)
    for i, pos in enumerate(seq.slots):
        col = np.zeros(2**n, dtype=complex)
        for a, word in gate_derivative_terms(gates[pos], n):
            v = apply_gate_array(prefix[pos], Gate("pauli", word=word), n)
            col += a * _run(gates[pos:], v, n)
        out[:, i] = col
    return out


def jacobian_states_naive(ansatz, theta) -> np.ndarray:
    """Same as :func:`jacobian_states` but rebuilds every ``V_{k,i}`` chain from scratch."""
    seq = as_sequence(ansatz)
    gates = seq.bind(theta)
    n = seq.n_qubits
    out = np.zeros((2**n, seq.n_params), dtype=complex)
    for i, pos in enumerate(seq.slots):
        for a, word in gate_derivative_terms(gates[pos], n):
            chain = gates[:pos] + [Gate("pauli", word=word)] + gates[pos:]
            v = np.zeros(2**n, dtype=complex)
            v[0] = 1.0
            out[:, i] += a * _run(chain, v, n)
    return out


def logical_depth(ansatz) -> int:
    """Longest gate chain when gates on disjoint qubits share a time step."""
    seq = as_sequence(ansatz)
    level = [0] * seq.n_qubits
    for g in seq.gates:
        d = max(level[q] for q in g.qubits) + 1
        for q in g.qubits:
            level[q] = d
    return max(level)


def gate_counts(ansatz) -> dict[str, int]:
    counts: dict[str, int] = {}
    for g in as_sequence(ansatz).gates:
        counts[g.kind] = counts.get(g.kind, 0) + 1
    return counts
