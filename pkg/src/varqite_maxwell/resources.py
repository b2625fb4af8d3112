"""Circuit and query-cost accounting for the VarQITE loop."""
from __future__ import annotations

from dataclasses import dataclass

from .mclachlan import CircuitLedger, expanded_circuit_counts

#: constant in front of the big-O query estimate; fixed to one
QUERY_CONSTANT = 1.0


@dataclass(frozen=True)
class StepCircuits:
    """Headline ``(d^2, d)`` pair plus the exact per-step ancilla-circuit count."""

    lambda_circuits: int
    c_circuits: int
    expanded_counts: tuple[int, int] | None = None


def circuits_per_step(d: int, ansatz=None, n_pauli_terms: int | None = None) -> StepCircuits:
    """Circuits needed for one evaluation of ``Lambda`` (``d^2``) and ``C`` (``d``).

    With an ansatz and the generator's Pauli-term count, the expanded count
    (derivative terms and Pauli terms included, all ordered pairs for ``Lambda``)
    is attached as ``expanded_counts``.
    """
    if d < 1:
        raise ValueError("parameter count must be >= 1")
    expanded = None
    if ansatz is not None:
        if n_pauli_terms is None:
            raise ValueError("expanded counts need the number of Pauli terms")
        expanded = expanded_circuit_counts(ansatz, n_pauli_terms)
    return StepCircuits(d * d, d, expanded)


def query_cost(t_total: float, dt: float, d: int, epsilon: float) -> float:
    """Order-of-magnitude query count ``t d^2 / (dt eps^2)`` with unit constant."""
    if min(t_total, dt, d, epsilon) <= 0:
        raise ValueError("all arguments must be positive")
    return QUERY_CONSTANT * t_total * d**2 / (dt * epsilon**2)


def predicted_ledger(ansatz, n_pauli_terms: int, n_steps: int, shots: int) -> CircuitLedger:
    """Ledger a shot-mode run of ``n_steps`` steps should report."""
    lam, c = expanded_circuit_counts(ansatz, n_pauli_terms)
    return CircuitLedger(lam * n_steps, c * n_steps, (lam + c) * n_steps * shots)


def accounting_identity(ledger: CircuitLedger, ansatz, n_pauli_terms: int, n_steps: int,
                        shots: int) -> bool:
    """True when the executed circuits and samples equal the expanded-count prediction."""
    expected = predicted_ledger(ansatz, n_pauli_terms, n_steps, shots)
    return (ledger.lambda_circuits, ledger.c_circuits, ledger.shots) == (
        expected.lambda_circuits, expected.c_circuits, expected.shots)


def cost_report(ansatz, n_pauli_terms: int, t_total: float, dt: float, epsilon: float) -> dict:
    """JSON-ready summary for one configuration."""
    from .ansatz import as_sequence

    d = as_sequence(ansatz).n_params
    step = circuits_per_step(d, ansatz, n_pauli_terms)
    n_steps = int(round(t_total / dt))
    return {
        "params": d,
        "lambda_circuits_per_step": step.lambda_circuits,
        "c_circuits_per_step": step.c_circuits,
        "expanded_lambda_circuits_per_step": step.expanded_counts[0],
        "expanded_c_circuits_per_step": step.expanded_counts[1],
        "n_steps": n_steps,
        "query_cost": query_cost(t_total, dt, d, epsilon),
        "query_cost_constant": QUERY_CONSTANT,
        "epsilon": epsilon,
    }
