"""Statevector simulation kernels.

Conventions used throughout the package:

* qubit 0 is the least significant bit of the amplitude index;
* a Pauli word is a string whose character ``k`` acts on qubit ``k``
  (so ``"IIYI"`` puts a ``Y`` on qubit 2 of a 4-qubit register);
* ``RY(theta) = exp(-i theta Y / 2)``.

Gates are applied with bit-masked index arithmetic; dense ``2^n x 2^n``
matrices are only built by :func:`gate_matrix` / :func:`circuit_matrix`,
which exist as brute-force oracles for small registers.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

PAULI_CHARS = "IXYZ"

_H = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
_SDG = np.array([[1, 0], [0, -1j]], dtype=complex)
_SDG_H = _H @ _SDG  # rotates the Y eigenbasis onto the Z eigenbasis
_PAULI = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


class InvalidGateError(ValueError):
    """A gate refers to qubits that do not exist or overlap."""


class PauliParseError(ValueError):
    """A Pauli word contains characters outside ``IXYZ`` or has the wrong length."""


@dataclass(frozen=True)
class StateVector:
    """Amplitudes of an ``n_qubits`` register.

    The amplitude array is copied and frozen on construction so that values
    can be shared freely between callers.
    """

    n_qubits: int
    amplitudes: np.ndarray = field(repr=False)

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=complex).reshape(-1)
        if amps.size != 2**self.n_qubits:
            raise ValueError(
                f"expected {2**self.n_qubits} amplitudes for {self.n_qubits} qubits, got {amps.size}"
            )
        amps.flags.writeable = False
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def zero(cls, n_qubits: int) -> "StateVector":
        amps = np.zeros(2**n_qubits, dtype=complex)
        amps[0] = 1.0
        return cls(n_qubits, amps)

    @classmethod
    def basis(cls, n_qubits: int, index: int) -> "StateVector":
        amps = np.zeros(2**n_qubits, dtype=complex)
        amps[index] = 1.0
        return cls(n_qubits, amps)

    @classmethod
    def from_array(cls, amplitudes) -> "StateVector":
        amps = np.asarray(amplitudes)
        n = int(round(np.log2(amps.size)))
        return cls(n, amps)

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def is_normalized(self, atol: float = 1e-12) -> bool:
        return abs(self.norm() - 1.0) <= atol

    def normalized(self) -> "StateVector":
        nrm = self.norm()
        if nrm == 0.0:
            raise ValueError("cannot normalize the zero vector")
        return StateVector(self.n_qubits, self.amplitudes / nrm)


@dataclass(frozen=True)
class Gate:
    """One circuit instruction.

    ``kind`` is one of ``ry``, ``cry``, ``cnot``, ``pauli``, ``phase``,
    ``h`` or ``sdg_h``. ``qubits`` lists the control first for the two-qubit
    kinds. ``control`` optionally conditions the whole gate on an extra
    (ancilla) qubit being in ``control_state``.
    """

    kind: str
    qubits: tuple[int, ...] = ()
    angle: float = 0.0
    word: str = ""
    control: int | None = None
    control_state: int = 1

    def with_control(self, control: int, state: int = 1) -> "Gate":
        return Gate(self.kind, self.qubits, self.angle, self.word, control, state)

    def acted_qubits(self) -> tuple[int, ...]:
        if self.kind == "pauli":
            return tuple(q for q, ch in enumerate(self.word) if ch != "I")
        return self.qubits


def RY(angle: float, target: int) -> Gate:
    return Gate("ry", (target,), angle=float(angle))


def CRY(angle: float, control: int, target: int) -> Gate:
    return Gate("cry", (control, target), angle=float(angle))


def CNOT(control: int, target: int) -> Gate:
    return Gate("cnot", (control, target))


def Phase(angle: float, target: int) -> Gate:
    return Gate("phase", (target,), angle=float(angle))


def Hadamard(target: int) -> Gate:
    return Gate("h", (target,))


def SdgH(target: int) -> Gate:
    return Gate("sdg_h", (target,))


def PauliWord(word: str) -> Gate:
    _check_word(word)
    return Gate("pauli", word=word)


@dataclass(frozen=True)
class PauliTerm:
    coefficient: complex
    word: str

    def __post_init__(self):
        _check_word(self.word)
        object.__setattr__(self, "coefficient", complex(self.coefficient))

    @property
    def n_qubits(self) -> int:
        return len(self.word)


def _check_word(word: str) -> None:
    bad = set(word) - set(PAULI_CHARS)
    if bad:
        raise PauliParseError(f"invalid Pauli characters {sorted(bad)} in {word!r}")


# --------------------------------------------------------------------------
# index helpers

@lru_cache(maxsize=None)
def _split(n: int, qubit: int) -> tuple[np.ndarray, np.ndarray]:
    """Indices with ``qubit`` cleared, and the same indices with it set."""
    idx = np.arange(2**n)
    lo = idx[(idx >> qubit) & 1 == 0]
    return lo, lo | (1 << qubit)


@lru_cache(maxsize=None)
def _split_controlled(n: int, control: int, target: int) -> tuple[np.ndarray, np.ndarray]:
    lo, hi = _split(n, target)
    keep = (lo >> control) & 1 == 1
    return lo[keep], hi[keep]


@lru_cache(maxsize=None)
def _control_mask(n: int, control: int, state: int) -> np.ndarray:
    idx = np.arange(2**n)
    return ((idx >> control) & 1) == state


@lru_cache(maxsize=None)
def _pauli_action(word: str) -> tuple[np.ndarray, np.ndarray]:
    """Return ``(perm, phase)`` with ``(P psi)[perm[x]] = phase[x] * psi[x]``."""
    n = len(word)
    flip = ymask = zmask = 0
    for q, ch in enumerate(word):
        if ch in "XY":
            flip |= 1 << q
        if ch == "Y":
            ymask |= 1 << q
        if ch in "YZ":
            zmask |= 1 << q
    idx = np.arange(2**n)
    parity = np.zeros(idx.size, dtype=np.int64)
    bits = idx & zmask
    while np.any(bits):
        parity ^= bits & 1
        bits = bits >> 1
    phase = (1j ** bin(ymask).count("1")) * (1 - 2 * parity)
    return idx ^ flip, phase.astype(complex)


def _matrix_1q(gate: Gate) -> np.ndarray:
    if gate.kind in ("ry", "cry"):
        c, s = np.cos(gate.angle / 2), np.sin(gate.angle / 2)
        return np.array([[c, -s], [s, c]], dtype=complex)
    if gate.kind == "phase":
        return np.array([[1, 0], [0, np.exp(1j * gate.angle)]], dtype=complex)
    if gate.kind == "h":
        return _H
    if gate.kind == "sdg_h":
        return _SDG_H
    if gate.kind == "cnot":
        return _PAULI["X"]
    raise InvalidGateError(f"no 2x2 block for gate kind {gate.kind!r}")


def validate_gate(gate: Gate, n_qubits: int) -> None:
    if gate.kind == "pauli":
        if len(gate.word) > n_qubits:
            raise InvalidGateError(f"word {gate.word!r} longer than {n_qubits} qubits")
        qubits = list(gate.acted_qubits())
    else:
        expected = 2 if gate.kind in ("cry", "cnot") else 1
        if len(gate.qubits) != expected:
            raise InvalidGateError(f"{gate.kind} needs {expected} qubit(s), got {gate.qubits}")
        qubits = list(gate.qubits)
    if gate.control is not None:
        if gate.control in qubits:
            raise InvalidGateError(f"control qubit {gate.control} overlaps targets {qubits}")
        qubits.append(gate.control)
    if len(set(qubits)) != len(qubits):
        raise InvalidGateError(f"repeated qubit in {gate}")
    for q in qubits:
        if not 0 <= q < n_qubits:
            raise InvalidGateError(f"qubit {q} out of range for {n_qubits} qubits")


def apply_gate_array(amps: np.ndarray, gate: Gate, n_qubits: int) -> np.ndarray:
    """Apply ``gate`` to a raw amplitude array and return a new array.

    No validation; hot loops call this directly after validating once.
    """
    out = np.array(amps, dtype=complex, copy=True)
    if gate.kind == "pauli":
        word = gate.word.ljust(n_qubits, "I")
        perm, phase = _pauli_action(word)
        if gate.control is None:
            out[perm] = phase * amps
        else:
            mask = _control_mask(n_qubits, gate.control, gate.control_state)
            src = np.nonzero(mask)[0]
            out[perm[src]] = phase[src] * amps[src]
        return out

    if gate.kind in ("cry", "cnot"):
        lo, hi = _split_controlled(n_qubits, gate.qubits[0], gate.qubits[1])
    else:
        lo, hi = _split(n_qubits, gate.qubits[0])
    if gate.control is not None:
        keep = ((lo >> gate.control) & 1) == gate.control_state
        lo, hi = lo[keep], hi[keep]
    a0, a1 = amps[lo], amps[hi]
    if gate.kind == "cnot":
        out[lo], out[hi] = a1, a0
    else:
        m = _matrix_1q(gate)
        out[lo] = m[0, 0] * a0 + m[0, 1] * a1
        out[hi] = m[1, 0] * a0 + m[1, 1] * a1
    return out


def apply_gate(state: StateVector, gate: Gate) -> StateVector:
    """Return ``U state`` for a single gate.

    Raises:
        InvalidGateError: if a qubit index is out of range or repeated.
    """
    validate_gate(gate, state.n_qubits)
    return StateVector(state.n_qubits, apply_gate_array(state.amplitudes, gate, state.n_qubits))


def apply_circuit(state: StateVector, gates: Iterable[Gate]) -> StateVector:
    amps = state.amplitudes
    for gate in gates:
        validate_gate(gate, state.n_qubits)
        amps = apply_gate_array(amps, gate, state.n_qubits)
    return StateVector(state.n_qubits, amps)


def apply_pauli_word(state: StateVector, word: str) -> StateVector:
    """Apply the tensor-product Pauli operator ``word`` (character k on qubit k)."""
    _check_word(word)
    if len(word) != state.n_qubits:
        raise PauliParseError(f"word {word!r} has length {len(word)}, expected {state.n_qubits}")
    return apply_gate(state, PauliWord(word))


def inner_product(a: StateVector, b: StateVector) -> complex:
    """``<a|b>``, conjugate-linear in ``a``."""
    if a.n_qubits != b.n_qubits:
        raise ValueError(f"dimension mismatch: {a.n_qubits} vs {b.n_qubits} qubits")
    return complex(np.vdot(a.amplitudes, b.amplitudes))


def apply_controlled(state: StateVector, gates: Sequence[Gate], ancilla: int,
                     control_state: int = 1) -> StateVector:
    """Apply ``gates`` conditioned on qubit ``ancilla`` being ``control_state``.

    Raises:
        InvalidGateError: if the ancilla coincides with a gate's qubits.
    """
    controlled = []
    for gate in gates:
        if ancilla in gate.acted_qubits() or (gate.kind != "pauli" and ancilla in gate.qubits):
            raise InvalidGateError(f"ancilla {ancilla} overlaps gate {gate}")
        if gate.control is not None:
            raise InvalidGateError("gate is already controlled")
        controlled.append(gate.with_control(ancilla, control_state))
    return apply_circuit(state, controlled)


# --------------------------------------------------------------------------
# dense oracles (small registers only)

def pauli_matrix(word: str) -> np.ndarray:
    """Dense matrix of a Pauli word; character k acts on qubit k."""
    _check_word(word)
    out = np.ones((1, 1), dtype=complex)
    for ch in word:  # qubit 0 first, ends up as the rightmost factor
        out = np.kron(_PAULI[ch], out)
    return out


def gate_matrix(gate: Gate, n_qubits: int) -> np.ndarray:
    """Dense ``2^n x 2^n`` unitary of ``gate`` built from Kronecker products.

    Independent of the bit-mask kernels, so it serves as their oracle.
    """
    validate_gate(gate, n_qubits)
    if gate.kind == "pauli":
        op = pauli_matrix(gate.word.ljust(n_qubits, "I"))
    else:
        op = _embed(gate, n_qubits)
    if gate.control is not None:
        on = np.array([((i >> gate.control) & 1) == gate.control_state
                       for i in range(2**n_qubits)], dtype=float)
        proj = np.diag(on)
        op = proj @ op + np.diag(1.0 - on)
    return op


def _embed(gate: Gate, n: int) -> np.ndarray:
    def kron_on(ops: dict[int, np.ndarray]) -> np.ndarray:
        out = np.ones((1, 1), dtype=complex)
        for q in range(n):
            out = np.kron(ops.get(q, np.eye(2)), out)
        return out

    if gate.kind in ("cry", "cnot"):
        c, t = gate.qubits
        p0 = np.array([[1, 0], [0, 0]], dtype=complex)
        p1 = np.array([[0, 0], [0, 1]], dtype=complex)
        return kron_on({c: p0}) + kron_on({c: p1, t: _matrix_1q(gate)})
    return kron_on({gate.qubits[0]: _matrix_1q(gate)})


def circuit_matrix(gates: Sequence[Gate], n_qubits: int) -> np.ndarray:
    out = np.eye(2**n_qubits, dtype=complex)
    for gate in gates:
        out = gate_matrix(gate, n_qubits) @ out
    return out
