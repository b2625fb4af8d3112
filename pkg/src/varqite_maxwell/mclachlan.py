"""McLachlan metric ``Lambda`` and force ``C`` for a parameterised circuit.

``Lambda_ij = Re <d_i phi|d_j phi>`` and ``C_i = Re <d_i phi|G|phi>``.

Two evaluation routes are provided. ``exact`` mode uses the statevector
Jacobian directly. ``shots`` mode expands every derivative into the
``a_k V_k|0>`` chains and estimates each overlap with an ancilla
(Hadamard-test) circuit, drawing ``M`` Bernoulli samples per circuit.
"""
from __future__ import annotations

import zlib
from dataclasses import dataclass, field

import numpy as np

from .ansatz import GateSequence, as_sequence, gate_derivative_terms, jacobian_states, state
from .pauli import PauliSum, matvec
from .quantum_core import Gate, Hadamard, Phase, apply_gate_array, validate_gate


@dataclass(frozen=True)
class EvaluationMode:
    """``exact`` or ``shots`` with ``M`` samples per circuit and a base seed."""

    kind: str = "exact"
    shots: int = 0
    seed: int = 0

    def __post_init__(self):
        if self.kind not in ("exact", "shots"):
            raise ValueError(f"unknown evaluation mode {self.kind!r}")
        if self.kind == "shots" and self.shots < 1:
            raise ValueError("shot mode needs M >= 1 samples")

    @classmethod
    def exact(cls) -> "EvaluationMode":
        return cls("exact")

    @classmethod
    def sampled(cls, shots: int, seed: int = 0) -> "EvaluationMode":
        return cls("shots", int(shots), int(seed))

    @classmethod
    def parse(cls, text: str, seed: int = 0) -> "EvaluationMode":
        """Parse ``exact`` or ``shots:M``."""
        text = text.strip()
        if text == "exact":
            return cls.exact()
        if text.startswith("shots:"):
            return cls.sampled(int(text.split(":", 1)[1]), seed)
        raise ValueError(f"mode must be 'exact' or 'shots:M', got {text!r}")

    def __str__(self) -> str:
        return "exact" if self.kind == "exact" else f"shots:{self.shots}"

    @property
    def is_exact(self) -> bool:
        return self.kind == "exact"


@dataclass
class CircuitLedger:
    """Counts of ancilla circuits executed and samples drawn."""

    lambda_circuits: int = 0
    c_circuits: int = 0
    shots: int = 0

    @property
    def circuits(self) -> int:
        return self.lambda_circuits + self.c_circuits

    def add(self, other: "CircuitLedger") -> None:
        self.lambda_circuits += other.lambda_circuits
        self.c_circuits += other.c_circuits
        self.shots += other.shots


@dataclass(frozen=True)
class McLachlanSystem:
    lam: np.ndarray
    c: np.ndarray
    mode: EvaluationMode = field(default_factory=EvaluationMode)
    ledger: CircuitLedger = field(default_factory=CircuitLedger)


# --------------------------------------------------------------------------
# ancilla circuits

# An ancilla program is a list of (gate, branch) pairs on the system register:
# branch None runs unconditionally, 0 only when the ancilla is |0>, 1 only
# when it is |1>. The ancilla is the extra most-significant qubit.

def ancilla_probability_zero(program, n_system: int, phase: float = 0.0) -> float:
    """Exact ``P(ancilla = 0)`` for ``H - Phase - program - H`` on ``n + 1`` qubits.

    Equals ``(1 + Re(e^{i phase} <A|B>)) / 2`` where ``|A>``/``|B>`` are the
    system states produced along the ``0``/``1`` branches.
    """
    n = n_system + 1
    anc = n_system
    amps = np.zeros(2**n, dtype=complex)
    amps[0] = 1.0
    amps = apply_gate_array(amps, Hadamard(anc), n)
    if phase:
        amps = apply_gate_array(amps, Phase(phase, anc), n)
    for gate, branch in program:
        g = gate if branch is None else gate.with_control(anc, branch)
        amps = apply_gate_array(amps, g, n)
    amps = apply_gate_array(amps, Hadamard(anc), n)
    p0 = float(np.sum(np.abs(amps[: 2**n_system]) ** 2))
    return min(1.0, max(0.0, p0))


def _circuit_seed(seed: int, key) -> np.random.Generator:
    digest = zlib.crc32(repr(key).encode())
    return np.random.default_rng([int(seed) & 0xFFFFFFFFFFFFFFFF, digest])


def estimate_real_part(p0: float, mode: EvaluationMode, key=()) -> float:
    """Turn an ancilla ``P(0)`` into ``2 P(0) - 1``, sampled in shot mode."""
    if mode.is_exact:
        return 2.0 * p0 - 1.0
    rng = _circuit_seed(mode.seed, key)
    zeros = rng.binomial(mode.shots, p0)
    return 2.0 * zeros / mode.shots - 1.0


def hadamard_test(prefix, controlled_a, controlled_b, phase: float = 0.0,
                  mode: EvaluationMode = EvaluationMode(), n_qubits: int | None = None,
                  key=()) -> float:
    """Estimate ``Re(e^{i phase} <psi|A^dag B|psi>)`` with ``|psi> = prefix|0>``.

    ``controlled_a`` runs on the ancilla-``|0>`` branch and ``controlled_b``
    on the ancilla-``|1>`` branch.
    """
    gates = list(prefix) + list(controlled_a) + list(controlled_b)
    if n_qubits is None:
        n_qubits = 1 + max((max(g.acted_qubits(), default=-1) for g in gates), default=0)
        n_qubits = max(n_qubits, max((len(g.word) for g in gates if g.kind == "pauli"), default=0))
    for g in gates:
        validate_gate(g, n_qubits)
    program = [(g, None) for g in prefix]
    program += [(g, 0) for g in controlled_a]
    program += [(g, 1) for g in controlled_b]
    p0 = ancilla_probability_zero(program, n_qubits, phase)
    return estimate_real_part(p0, mode, key)


def _weighted(weight: complex, program, n: int, mode: EvaluationMode, key) -> float:
    """``Re(weight * <A|B>)`` measured as ``|weight| * Re(e^{i arg w} <A|B>)``."""
    p0 = ancilla_probability_zero(program, n, float(np.angle(weight)))
    return abs(weight) * estimate_real_part(p0, mode, key)


def lambda_circuits(seq: GateSequence, theta):
    """Yield ``(i, j, weight, program)`` for every overlap needed by ``Lambda``.

    All ordered pairs ``(i, j)`` are run, ``d^2`` overlaps before the
    derivative-term expansion. ``sigma_k`` of parameter ``i`` sits on the
    ancilla-``|0>`` branch, ``sigma_l`` of ``j`` on the ``|1>`` branch.
    """
    gates = seq.bind(theta)
    n = seq.n_qubits
    terms = [gate_derivative_terms(gates[pos], n) for pos in seq.slots]
    for i, pi in enumerate(seq.slots):
        for j, pj in enumerate(seq.slots):
            lo, hi = min(pi, pj), max(pi, pj)
            for a_k, w_k in terms[i]:
                for a_l, w_l in terms[j]:
                    first, second = ((w_k, 0), (w_l, 1)) if pi <= pj else ((w_l, 1), (w_k, 0))
                    program = [(g, None) for g in gates[:lo]]
                    program.append((Gate("pauli", word=first[0]), first[1]))
                    program += [(g, None) for g in gates[lo:hi]]
                    program.append((Gate("pauli", word=second[0]), second[1]))
                    yield i, j, np.conj(a_k) * a_l, program


def c_circuits(seq: GateSequence, theta, generator: PauliSum):
    """Yield ``(i, weight, program)`` for every overlap needed by ``C``."""
    gates = seq.bind(theta)
    n = seq.n_qubits
    for i, pos in enumerate(seq.slots):
        for a_k, w_k in gate_derivative_terms(gates[pos], n):
            for term in generator.terms:
                program = [(g, None) for g in gates[:pos]]
                program.append((Gate("pauli", word=w_k), 0))
                program += [(g, None) for g in gates[pos:]]
                program.append((Gate("pauli", word=term.word), 1))
                yield i, np.conj(a_k) * term.coefficient, program


def _theta_tag(theta) -> int:
    return zlib.crc32(np.ascontiguousarray(theta, dtype=float).tobytes())


def lambda_matrix(ansatz, theta, mode: EvaluationMode = EvaluationMode(),
                  ledger: CircuitLedger | None = None, via_circuits: bool = False) -> np.ndarray:
    """McLachlan metric. ``via_circuits`` forces the ancilla route even in exact mode."""
    seq = as_sequence(ansatz)
    if mode.is_exact and not via_circuits:
        jac = jacobian_states(seq, theta)
        lam = np.real(jac.conj().T @ jac)
        return 0.5 * (lam + lam.T)
    d = seq.n_params
    lam = np.zeros((d, d))
    tag = _theta_tag(theta)
    for count, (i, j, w, program) in enumerate(lambda_circuits(seq, theta)):
        lam[i, j] += _weighted(w, program, seq.n_qubits, mode, ("L", tag, i, j, count))
        if ledger is not None:
            ledger.lambda_circuits += 1
            ledger.shots += mode.shots
    return 0.5 * (lam + lam.T)


def c_vector(ansatz, theta, generator: PauliSum, mode: EvaluationMode = EvaluationMode(),
             ledger: CircuitLedger | None = None, via_circuits: bool = False,
             norm_correction: bool = False) -> np.ndarray:
    """McLachlan force ``Re <d_i phi|G|phi>``.

    With ``norm_correction`` the expectation ``Re <phi|G|phi>`` is subtracted
    from ``G`` first, which keeps the flow on the unit sphere for generators
    that are not antisymmetric.
    """
    seq = as_sequence(ansatz)
    if generator.n_qubits != seq.n_qubits:
        raise ValueError(f"generator acts on {generator.n_qubits} qubits, ansatz on {seq.n_qubits}")
    if norm_correction:
        phi = state(seq, theta).amplitudes
        energy = float(np.real(np.vdot(phi, matvec(generator, phi))))
        if energy:
            generator = PauliSum(generator.n_qubits,
                                 generator.terms + PauliSum.identity(generator.n_qubits, -energy).terms)
    if mode.is_exact and not via_circuits:
        jac = jacobian_states(seq, theta)
        phi = state(seq, theta).amplitudes
        return np.real(jac.conj().T @ matvec(generator, phi))
    c = np.zeros(seq.n_params)
    tag = _theta_tag(theta)
    for count, (i, w, program) in enumerate(c_circuits(seq, theta, generator)):
        c[i] += _weighted(w, program, seq.n_qubits, mode, ("C", tag, i, count))
        if ledger is not None:
            ledger.c_circuits += 1
            ledger.shots += mode.shots
    return c


def evaluate(ansatz, theta, generator: PauliSum, mode: EvaluationMode = EvaluationMode(),
             norm_correction: bool = False) -> McLachlanSystem:
    ledger = CircuitLedger()
    lam = lambda_matrix(ansatz, theta, mode, ledger)
    c = c_vector(ansatz, theta, generator, mode, ledger, norm_correction=norm_correction)
    return McLachlanSystem(lam, c, mode, ledger)


def expanded_circuit_counts(ansatz, n_pauli_terms: int) -> tuple[int, int]:
    """Number of ancilla circuits one shot-mode evaluation runs for ``(Lambda, C)``."""
    seq = as_sequence(ansatz)
    k = [2 if seq.gates[pos].kind == "cry" else 1 for pos in seq.slots]
    total = sum(k)
    return total * total, total * n_pauli_terms


def _dense_gate_derivative(gate: Gate, n: int) -> np.ndarray:
    """d/dtheta of the dense gate matrix, differentiating the 2x2 rotation entrywise."""
    c, s = np.cos(gate.angle / 2), np.sin(gate.angle / 2)
    d_rot = 0.5 * np.array([[-s, -c], [c, -s]], dtype=complex)
    ops = {}
    if gate.kind == "ry":
        ops[gate.qubits[0]] = d_rot
    elif gate.kind == "cry":
        ops[gate.qubits[0]] = np.array([[0, 0], [0, 1]], dtype=complex)
        ops[gate.qubits[1]] = d_rot
    else:
        raise ValueError(f"gate kind {gate.kind!r} has no parameter")
    out = np.ones((1, 1), dtype=complex)
    for q in range(n):
        out = np.kron(ops.get(q, np.eye(2)), out)
    return out


def brute_force_system(ansatz, theta, generator_matrix: np.ndarray):
    """Dense oracle for small registers: explicit circuit matrices, explicit gate derivatives.

    Returns ``(Lambda, C)``.
    """
    from .quantum_core import gate_matrix

    seq = as_sequence(ansatz)
    n = seq.n_qubits
    gates = seq.bind(theta)
    mats = [gate_matrix(g, n) for g in gates]
    e0 = np.zeros(2**n, dtype=complex)
    e0[0] = 1.0

    def chain(ms):
        v = e0
        for m in ms:
            v = m @ v
        return v

    phi = chain(mats)
    cols = []
    for pos in seq.slots:
        ms = list(mats)
        ms[pos] = _dense_gate_derivative(gates[pos], n)
        cols.append(chain(ms))
    jac = np.array(cols).T
    lam = np.real(jac.conj().T @ jac)
    c = np.real(jac.conj().T @ (np.asarray(generator_matrix) @ phi))
    return lam, c
