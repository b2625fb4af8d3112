"""Fitting the ansatz to the discretised initial condition.

The cost is ``1 - |<phi(theta)|psi_0>|^2``; it is minimised with SPSA
(simultaneous perturbation stochastic approximation), which needs only two
cost evaluations per iteration regardless of the parameter count.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from .ansatz import as_sequence, jacobian_states, state
from .maxwell import MaxwellConfig, flatten, gaussian_initial
from .mclachlan import EvaluationMode, estimate_real_part
from .quantum_core import StateVector

MAX_GRID = 2**14


@dataclass(frozen=True)
class SpsaConfig:
    """SPSA gains and restart policy.

    Starting angles are drawn from ``N(0, init_scale^2)``; small angles keep
    the circuit near the identity where the cost landscape is smooth.
    """

    iterations: int = 2000
    a: float = 2.0
    c: float = 0.1
    A: float = 200.0
    alpha: float = 0.602
    gamma: float = 0.101
    restarts: int = 3
    seed: int = 0
    init_scale: float = 0.5

    def __post_init__(self):
        if self.iterations < 1:
            raise ValueError("iterations must be >= 1")
        if self.c <= 0:
            raise ValueError("perturbation size c must be positive")
        if not (0 < self.alpha <= 1 and 0 < self.gamma <= 1):
            raise ValueError("alpha and gamma must lie in (0, 1]")
        if self.restarts < 1:
            raise ValueError("restarts must be >= 1")
        if self.init_scale < 0:
            raise ValueError("init_scale must be >= 0")


@dataclass
class FitResult:
    theta0: np.ndarray
    final_cost: float
    cost_history: np.ndarray
    converged: bool
    restart_costs: list[float] = field(default_factory=list)


def target_state(config: MaxwellConfig, center: float | None = None,
                 width: float | None = None) -> StateVector:
    """Normalised, flattened Gaussian initial condition as a register state."""
    u = flatten(gaussian_initial(config, center, width))
    nrm = np.linalg.norm(u)
    if nrm == 0:
        raise ValueError("initial condition has zero norm")
    return StateVector(config.n_qubits, u / nrm)


def swap_test_probability(a: StateVector, b: StateVector) -> float:
    """``P(ancilla = 0)`` of the SWAP test on two registers: ``(1 + |<a|b>|^2) / 2``.

    Simulated on ``2n + 1`` qubits: H on the ancilla, controlled swap of the
    registers, H again.
    """
    if a.n_qubits != b.n_qubits:
        raise ValueError("SWAP test needs registers of equal size")
    joint = np.kron(b.amplitudes, a.amplitudes)  # register a on the low qubits
    dim = a.dim
    swapped = joint.reshape(dim, dim).T.reshape(-1)
    # ancilla |0>: (joint + swapped)/2, ancilla |1>: (joint - swapped)/2
    branch0 = 0.5 * (joint + swapped)
    return float(np.vdot(branch0, branch0).real)


def fidelity(ansatz, theta, target: StateVector, mode: EvaluationMode = EvaluationMode(),
             key=()) -> float:
    """``|<phi(theta)|target>|^2``; in shot mode estimated from SWAP-test samples."""
    phi = state(ansatz, theta)
    if phi.n_qubits != target.n_qubits:
        raise ValueError(f"ansatz has {phi.n_qubits} qubits, target {target.n_qubits}")
    if mode.is_exact:
        f = abs(np.vdot(phi.amplitudes, target.amplitudes)) ** 2
        return float(min(1.0, f))
    p0 = swap_test_probability(phi, target)
    # the SWAP estimate is 2 P(0) - 1, the same mapping as the Hadamard test
    return float(estimate_real_part(p0, mode, ("swap", key)))


def cost(ansatz, theta, target: StateVector, mode: EvaluationMode = EvaluationMode(), key=()) -> float:
    return 1.0 - fidelity(ansatz, theta, target, mode, key)


def _spsa_run(seq, target, cfg: SpsaConfig, theta: np.ndarray, rng: np.random.Generator,
              eps_init: float):
    def f(t):
        return 1.0 - abs(np.vdot(state(seq, t).amplitudes, target.amplitudes)) ** 2

    best_theta, best = theta.copy(), f(theta)
    history = [best]
    if best <= eps_init:
        return best_theta, best, history
    for k in range(cfg.iterations):
        ak = cfg.a / (k + 1 + cfg.A) ** cfg.alpha
        ck = cfg.c / (k + 1) ** cfg.gamma
        delta = rng.choice((-1.0, 1.0), size=theta.size)
        grad = (f(theta + ck * delta) - f(theta - ck * delta)) / (2 * ck) * delta
        theta = theta - ak * grad
        val = f(theta)
        if val < best:
            best, best_theta = val, theta.copy()
        history.append(best)
    return best_theta, best, history


def polish(ansatz, target: StateVector, theta, max_iter: int = 2000):
    """Refine ``theta`` with L-BFGS on the exact infidelity and its analytic gradient.

    Returns ``(theta, cost)``; the input is returned unchanged if the
    optimiser does not improve on it.
    """
    seq = as_sequence(ansatz)
    tgt = target.amplitudes

    def f(t):
        ov = np.vdot(state(seq, t).amplitudes, tgt)
        grad = -2.0 * np.real(np.conj(ov) * (jacobian_states(seq, t).conj().T @ tgt))
        return 1.0 - abs(ov) ** 2, grad

    theta = np.asarray(theta, dtype=float)
    start = f(theta)[0]
    res = minimize(f, theta, jac=True, method="L-BFGS-B", options={"maxiter": max_iter})
    if res.fun < start:
        return np.asarray(res.x), float(max(res.fun, 0.0))
    return theta, float(start)


def spsa_fit(ansatz, target: StateVector, config: SpsaConfig = SpsaConfig(),
             eps_init: float = 1e-2, theta_init=None, polish_result: bool = False) -> FitResult:
    """Best-of-restarts SPSA minimisation of the infidelity to ``target``.

    Restart 0 starts from ``theta_init`` when given; other restarts draw
    small random angles. With ``polish_result`` each restart's SPSA point is
    refined by :func:`polish` before the best one is chosen. Non-convergence is reported through
    ``converged``, never raised.
    """
    if not 0 < eps_init < 1:
        raise ValueError("eps_init must lie in (0, 1)")
    seq = as_sequence(ansatz)
    seeds = np.random.SeedSequence(config.seed).spawn(config.restarts)
    results = []
    for r, ss in enumerate(seeds):
        rng = np.random.default_rng(ss)
        if r == 0 and theta_init is not None:
            theta = np.array(theta_init, dtype=float)
        else:
            theta = rng.normal(0.0, config.init_scale, seq.n_params)
        theta, final, history = _spsa_run(seq, target, config, theta, rng, eps_init)
        if polish_result and final > 0:
            theta, final = polish(seq, target, theta)
            history = history + [min(final, history[-1])]
        results.append((theta, final, history))
        if results[-1][1] <= eps_init and r == 0 and theta_init is not None:
            break
    best = min(range(len(results)), key=lambda r: results[r][1])
    theta, final, history = results[best]
    return FitResult(theta, float(final), np.array(history), bool(final <= eps_init),
                     [float(r[1]) for r in results])


def fit_initial_state(spec_factory, target: StateVector, config: SpsaConfig, eps_init: float,
                      max_layers: int = 10, polish_result: bool = False) -> tuple[object, FitResult]:
    """Increase ansatz depth until the fitted infidelity drops to ``eps_init``.

    ``spec_factory(layers)`` must return an ansatz spec. Returns the first
    spec that converges, or the last one tried.
    """
    result = None
    spec = None
    for layers in range(1, max_layers + 1):
        spec = spec_factory(layers)
        result = spsa_fit(spec, target, config, eps_init, polish_result=polish_result)
        if result.converged:
            break
    return spec, result


def discretization_error(n_grid: int, center: float, width: float, domain_length: float = 1.0,
                         refine: int = 16) -> float:
    """Distance between the normalised IC on ``n_grid`` nodes and a ``refine``-times finer grid.

    The fine reference is restricted to the coarse nodes (every ``refine``-th
    sample) and both vectors are normalised with the coarse-grid scaling.
    """
    coarse = np.arange(n_grid) * (domain_length / n_grid)
    fine = np.arange(n_grid * refine) * (domain_length / (n_grid * refine))

    def g(x):
        return np.exp(-((x - center) ** 2) / (2 * width**2))

    u = g(coarse)
    u /= np.linalg.norm(u)
    ref = g(fine)
    # Riemann-normalise the fine grid, then sample it at the coarse nodes
    ref = ref / np.sqrt(np.sum(ref**2) / refine)
    return float(np.linalg.norm(u - ref[::refine]))


def refine_mesh(center: float = 0.5, width: float = 0.08, eps_discretization: float = 1e-3,
                domain_length: float = 1.0, start: int = 4, refine: int = 16) -> int:
    """Smallest power-of-two grid whose discretised IC is within ``eps`` of the fine reference.

    Raises:
        RuntimeError: if no grid up to ``2**14`` nodes meets the tolerance.
    """
    if eps_discretization <= 0:
        raise ValueError("eps_discretization must be positive")
    n = start
    while n <= MAX_GRID:
        if discretization_error(n, center, width, domain_length, refine) < eps_discretization:
            return n
        n *= 2
    raise RuntimeError(f"no grid up to {MAX_GRID} nodes reaches eps={eps_discretization}")

