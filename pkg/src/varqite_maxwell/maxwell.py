"""Semi-discrete 1D Maxwell system and its classical FDTD reference.

The reduced system keeps ``U = (B_y, B_z, E_y, E_z)`` and reads
``dU/dt + A dU/dx = 0`` with the flux Jacobian ``A``. Central differences in
space give ``du/dt = G u`` with ``G = -(A kron D)``, where ``D`` is the
central-difference matrix. The flat vector ``u`` is stored field-major:
``u[f * n_grid + i]`` is field ``f`` at node ``i``, so the two most
significant qubits select the field.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .pauli import PauliSum, decompose

log = logging.getLogger(__name__)

FIELDS = ("by", "bz", "ey", "ez")
BOUNDARIES = ("periodic", "dirichlet_zero")


@dataclass(frozen=True)
class MaxwellConfig:
    n_grid: int = 16
    domain_length: float = 1.0
    c: float = 1.0
    dt: float | None = None
    boundary: str = "periodic"

    def __post_init__(self):
        n = self.n_grid
        if n < 4 or n & (n - 1):
            raise ValueError(f"n_grid must be a power of two >= 4, got {n}")
        if self.c <= 0 or self.domain_length <= 0:
            raise ValueError("c and domain_length must be positive")
        if self.boundary not in BOUNDARIES:
            raise ValueError(f"boundary must be one of {BOUNDARIES}, got {self.boundary!r}")
        if self.dt is None:
            object.__setattr__(self, "dt", 0.1 * self.dx / self.c)
        if self.dt <= 0:
            raise ValueError("dt must be positive")
        courant = self.c * self.dt / self.dx
        if courant > 1.0:
            raise ValueError(f"c*dt/dx = {courant:.3g} exceeds 1")
        if courant > 0.5:
            log.warning("c*dt/dx = %.3g > 0.5; forward Euler will amplify quickly", courant)

    @property
    def dx(self) -> float:
        return self.domain_length / self.n_grid

    @property
    def n_qubits(self) -> int:
        return int(math.log2(4 * self.n_grid))

    def nodes(self) -> np.ndarray:
        return np.arange(self.n_grid) * self.dx


@dataclass(frozen=True)
class FieldState:
    by: np.ndarray
    bz: np.ndarray
    ey: np.ndarray
    ez: np.ndarray

    def __post_init__(self):
        lengths = {np.asarray(getattr(self, f)).shape for f in FIELDS}
        if len(lengths) != 1:
            raise ValueError(f"field vectors differ in shape: {lengths}")
        for f in FIELDS:
            arr = np.array(getattr(self, f), dtype=float)
            arr.flags.writeable = False
            object.__setattr__(self, f, arr)

    @property
    def n_grid(self) -> int:
        return self.by.size


@dataclass(frozen=True)
class Generator:
    matrix: sp.csr_matrix
    pauli_form: PauliSum = field(repr=False)

    @property
    def dimension(self) -> int:
        return self.matrix.shape[0]


def jacobian(c: float) -> np.ndarray:
    """Flux Jacobian ``dF/dU`` for ``U = (B_y, B_z, E_y, E_z)``."""
    c2 = c * c
    return np.array([
        [0.0, 0.0, 0.0, -1.0],
        [0.0, 0.0, 1.0, 0.0],
        [0.0, c2, 0.0, 0.0],
        [-c2, 0.0, 0.0, 0.0],
    ])


def stencil(n_grid: int, boundary: str = "periodic") -> sp.csr_matrix:
    """Unscaled central-difference matrix: ``(S u)_i = u_{i+1} - u_{i-1}``."""
    if n_grid < 4:
        raise ValueError("n_grid must be >= 4")
    up = sp.eye(n_grid, k=1, format="lil")
    down = sp.eye(n_grid, k=-1, format="lil")
    if boundary == "periodic":
        up[n_grid - 1, 0] = 1.0
        down[0, n_grid - 1] = 1.0
    elif boundary != "dirichlet_zero":
        raise ValueError(f"unknown boundary {boundary!r}")
    return sp.csr_matrix(up - down)


def shift_operator(n_grid: int, dx: float, boundary: str = "periodic") -> sp.csr_matrix:
    """Central-difference approximation of ``d/dx``."""
    return stencil(n_grid, boundary) / (2.0 * dx)


def generator_matrix(config: MaxwellConfig) -> sp.csr_matrix:
    d_unit = stencil(config.n_grid, config.boundary)
    # integer stencil is scaled once so antisymmetry survives exactly at c = 1
    return sp.csr_matrix(sp.kron(sp.csr_matrix(jacobian(config.c)), d_unit) * (-1.0 / (2.0 * config.dx)))


def assemble_generator(config: MaxwellConfig, prune_threshold: float = 1e-12) -> Generator:
    """Build ``G`` with ``du/dt = G u`` together with its Pauli decomposition."""
    mat = generator_matrix(config)
    return Generator(mat, decompose(mat, prune_threshold))


def flatten(state: FieldState) -> np.ndarray:
    return np.concatenate([state.by, state.bz, state.ey, state.ez])


def unflatten(u: np.ndarray) -> FieldState:
    u = np.asarray(u)
    if u.size % 4:
        raise ValueError(f"flat field vector length {u.size} is not divisible by 4")
    n = u.size // 4
    return FieldState(*(u[k * n:(k + 1) * n] for k in range(4)))


def gaussian_initial(config: MaxwellConfig, center: float | None = None,
                     width: float | None = None) -> FieldState:
    """Gaussian ``B_z`` pulse, all other components zero.

    Defaults: centre at half the domain, width 0.08 of the domain.
    """
    L = config.domain_length
    center = 0.5 * L if center is None else center
    width = 0.08 * L if width is None else width
    if not 0 < center < L or width <= 0:
        raise ValueError(f"need 0 < center < {L} and width > 0")
    x = config.nodes()
    zero = np.zeros(config.n_grid)
    return FieldState(zero, np.exp(-((x - center) ** 2) / (2 * width**2)), zero, zero)


def classical_step(u: np.ndarray, G, dt: float) -> np.ndarray:
    """One forward-Euler step ``u + dt G u``."""
    return u + dt * (G @ u)


def n_steps(t_final: float, dt: float) -> int:
    if t_final < 0:
        raise ValueError("t_final must be non-negative")
    return int(round(t_final / dt))


def classical_solve(config: MaxwellConfig, initial: FieldState, t_final: float,
                    stride: int = 1) -> list[tuple[float, FieldState]]:
    """Forward-Euler trajectory sampled every ``stride`` steps (always including t=0)."""
    G = generator_matrix(config)
    u = flatten(initial)
    out = [(0.0, unflatten(u))]
    steps = n_steps(t_final, config.dt)
    for k in range(1, steps + 1):
        u = classical_step(u, G, config.dt)
        if k % stride == 0:
            out.append((k * config.dt, unflatten(u)))
    return out
