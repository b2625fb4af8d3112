"""Explicit-Euler integration of the McLachlan parameter flow ``Lambda theta' = C``."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .ansatz import as_sequence, state
from .mclachlan import CircuitLedger, EvaluationMode, evaluate
from .pauli import PauliSum
from .quantum_core import StateVector

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class Regularization:
    """``svd`` keeps singular values ``>= rho * sigma_max``; ``ridge`` solves ``(Lambda + lam I) x = C``."""

    kind: str = "svd"
    rho: float = 1e-8
    ridge: float = 0.0

    def __post_init__(self):
        if self.kind == "svd" and not 0 < self.rho < 1:
            raise ValueError(f"svd cutoff must lie in (0, 1), got {self.rho}")
        if self.kind == "ridge" and self.ridge < 0:
            raise ValueError(f"ridge parameter must be >= 0, got {self.ridge}")
        if self.kind not in ("svd", "ridge"):
            raise ValueError(f"unknown regularization {self.kind!r}")


@dataclass(frozen=True)
class FlowDiagnostics:
    residual: float
    smallest_retained: float
    condition: float
    rank: int
    degenerate: bool = False


def solve_flow(lam: np.ndarray, c: np.ndarray, reg: Regularization = Regularization()):
    """Regularised solve of ``Lambda x = C``.

    Returns ``(x, FlowDiagnostics)``. When every singular value falls below
    the cutoff the flow is zero and ``degenerate`` is set; no exception is
    raised.
    """
    lam = np.asarray(lam, dtype=float)
    c = np.asarray(c, dtype=float)
    if lam.ndim != 2 or lam.shape[0] != lam.shape[1] or c.shape != (lam.shape[0],):
        raise ValueError(f"incompatible shapes {lam.shape} and {c.shape}")
    u, s, vt = np.linalg.svd(lam)
    smax = s[0] if s.size else 0.0
    if reg.kind == "svd":
        keep = s >= reg.rho * smax if smax > 0 else np.zeros_like(s, dtype=bool)
        if not np.any(keep):
            x = np.zeros_like(c)
            diag = FlowDiagnostics(float(np.linalg.norm(c)), 0.0, float("inf"), 0, True)
            return x, diag
        x = vt[keep].T @ ((u[:, keep].T @ c) / s[keep])
        smallest = float(s[keep][-1])
        rank = int(keep.sum())
    else:
        x = np.linalg.solve(lam + reg.ridge * np.eye(lam.shape[0]), c)
        positive = s[s > 0]
        smallest = float(positive[-1]) if positive.size else 0.0
        rank = int(positive.size)
    cond = float(smax / smallest) if smallest > 0 else float("inf")
    residual = float(np.linalg.norm(lam @ x - c))
    return x, FlowDiagnostics(residual, smallest, cond, rank, False)


def step(theta: np.ndarray, theta_dot: np.ndarray, dt: float) -> np.ndarray:
    return np.asarray(theta, dtype=float) + dt * np.asarray(theta_dot, dtype=float)


@dataclass(frozen=True)
class EvolutionConfig:
    dt: float
    t_final: float
    regularization: Regularization = field(default_factory=Regularization)
    mode: EvaluationMode = field(default_factory=EvaluationMode)
    snapshot_stride: int = 1
    norm_correction: bool = False

    def __post_init__(self):
        if self.dt <= 0:
            raise ValueError("dt must be positive")
        if self.t_final < 0:
            raise ValueError("t_final must be non-negative")
        if self.snapshot_stride < 1:
            raise ValueError("snapshot_stride must be >= 1")

    @property
    def n_steps(self) -> int:
        return int(round(self.t_final / self.dt))


@dataclass
class Trajectory:
    times: list[float] = field(default_factory=list)
    thetas: list[np.ndarray] = field(default_factory=list)
    states: list[StateVector] = field(default_factory=list)
    diagnostics: list[FlowDiagnostics] = field(default_factory=list)
    ledger: CircuitLedger = field(default_factory=CircuitLedger)

    def __len__(self) -> int:
        return len(self.times)

    @property
    def degenerate_steps(self) -> int:
        return sum(d.degenerate for d in self.diagnostics)


def _step_mode(mode: EvaluationMode, k: int) -> EvaluationMode:
    if mode.is_exact:
        return mode
    seed = int(np.random.SeedSequence([mode.seed, k]).generate_state(1, np.uint64)[0])
    return EvaluationMode.sampled(mode.shots, seed)


def evolve(ansatz, theta0, generator: PauliSum, config: EvolutionConfig) -> Trajectory:
    """Run the VarQITE loop from ``theta0`` and return the sampled trajectory.

    Snapshots are taken at ``t = 0`` and every ``snapshot_stride`` steps.
    """
    seq = as_sequence(ansatz)
    theta = np.array(theta0, dtype=float)
    if theta.shape != (seq.n_params,):
        raise ValueError(f"theta0 has shape {theta.shape}, ansatz needs {seq.n_params} parameters")
    traj = Trajectory()
    traj.times.append(0.0)
    traj.thetas.append(theta.copy())
    traj.states.append(state(seq, theta))
    for k in range(config.n_steps):
        system = evaluate(seq, theta, generator, _step_mode(config.mode, k), config.norm_correction)
        traj.ledger.add(system.ledger)
        theta_dot, diag = solve_flow(system.lam, system.c, config.regularization)
        traj.diagnostics.append(diag)
        if diag.degenerate:
            log.warning("step %d: McLachlan system has no retained singular values", k)
        theta = step(theta, theta_dot, config.dt)
        if (k + 1) % config.snapshot_stride == 0:
            traj.times.append((k + 1) * config.dt)
            traj.thetas.append(theta.copy())
            traj.states.append(state(seq, theta))
    return traj
