"""Trace-distance error between quantum and classical trajectories."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .quantum_core import StateVector


@dataclass(frozen=True)
class ErrorReport:
    per_step_trace_error: np.ndarray
    epsilon_tr: float
    per_step_fidelity: np.ndarray
    times: np.ndarray
    metadata: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "epsilon_tr": self.epsilon_tr,
            "times": self.times.tolist(),
            "per_step_trace_error": self.per_step_trace_error.tolist(),
            "per_step_fidelity": self.per_step_fidelity.tolist(),
            "metadata": dict(self.metadata),
        }


def _amps(x) -> np.ndarray:
    return x.amplitudes if isinstance(x, StateVector) else np.asarray(x)


def _overlap_terms(quantum_state, classical_vector) -> tuple[float, float]:
    """``(|<q|u>|, 1 - |<q|u>|)`` for the normalised vectors.

    The second entry is computed as ``|q - e^{i phi} u|^2 / 2`` with the phase
    aligned, which stays exactly zero for identical inputs instead of
    picking up rounding noise.
    """
    u = _amps(classical_vector)
    nrm = np.linalg.norm(u)
    if nrm == 0:
        raise ValueError("classical vector is zero")
    u = u / nrm
    q = _amps(quantum_state)
    q = q / np.linalg.norm(q)
    ov = np.vdot(q, u)
    mag = abs(ov)
    phase = np.conj(ov) / mag if mag > 0 else 1.0
    gap = 0.5 * float(np.vdot(q - phase * u, q - phase * u).real)
    return float(min(mag, 1.0)), float(min(max(gap, 0.0), 1.0))


def fidelity(quantum_state, classical_vector) -> float:
    """``|<psi_q|u*>|^2`` after normalising both vectors."""
    mag, _ = _overlap_terms(quantum_state, classical_vector)
    return mag**2


def _infidelity(quantum_state, classical_vector) -> float:
    mag, gap = _overlap_terms(quantum_state, classical_vector)
    return min(1.0, gap * (1.0 + mag))


def trace_error(quantum_state, classical_vector) -> float:
    """``sqrt(1 - |<psi_q|u*>|^2)`` with ``u*`` the normalised classical vector."""
    return float(np.sqrt(_infidelity(quantum_state, classical_vector)))


def time_average_trace_error(q_traj, c_traj, q_times=None, c_times=None, dt: float | None = None,
                             metadata: dict | None = None) -> ErrorReport:
    """Mean of the per-snapshot trace errors.

    Snapshots are paired by position; when time stamps are supplied they must
    agree to within ``dt / 2``.

    Raises:
        ValueError: on differing snapshot counts or misaligned time stamps.
    """
    if len(q_traj) != len(c_traj):
        raise ValueError(f"snapshot counts differ: {len(q_traj)} vs {len(c_traj)}")
    if len(q_traj) == 0:
        raise ValueError("empty trajectories")
    times = np.arange(len(q_traj), dtype=float)
    if q_times is not None and c_times is not None:
        q_times, c_times = np.asarray(q_times, float), np.asarray(c_times, float)
        tol = 0.5 * dt if dt is not None else 1e-9
        gap = np.max(np.abs(q_times - c_times))
        if gap > tol:
            raise ValueError(f"trajectories misaligned by {gap:.3g} (tolerance {tol:.3g})")
        times = q_times
    fids = np.array([fidelity(q, c) for q, c in zip(q_traj, c_traj)])
    errs = np.array([trace_error(q, c) for q, c in zip(q_traj, c_traj)])
    return ErrorReport(errs, float(np.mean(errs)), fids, times, dict(metadata or {}))
