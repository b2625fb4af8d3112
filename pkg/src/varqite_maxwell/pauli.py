"""Pauli-string decomposition of ``2^n x 2^n`` matrices.

A matrix is written as ``M = sum_P c_P P`` with ``c_P = Tr(P M) / 2^n``.
Coefficients are computed from the bit action of each Pauli word (a
permutation plus a phase) rather than from Kronecker products, which costs
``O(2^n)`` per word instead of ``O(8^n)``.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .quantum_core import PAULI_CHARS, PauliTerm, StateVector, _pauli_action, pauli_matrix

DEFAULT_PRUNE = 1e-12


@dataclass(frozen=True)
class PauliSum:
    """Weighted sum of Pauli words, merged by word and sorted."""

    n_qubits: int
    terms: tuple[PauliTerm, ...] = field(default=())

    def __post_init__(self):
        merged: dict[str, complex] = {}
        for term in self.terms:
            if len(term.word) != self.n_qubits:
                raise ValueError(f"word {term.word!r} does not have length {self.n_qubits}")
            merged[term.word] = merged.get(term.word, 0j) + term.coefficient
        terms = tuple(PauliTerm(c, w) for w, c in sorted(merged.items()) if c != 0)
        object.__setattr__(self, "terms", terms)

    def __len__(self) -> int:
        return len(self.terms)

    def __iter__(self):
        return iter(self.terms)

    def coefficients(self) -> dict[str, complex]:
        return {t.word: t.coefficient for t in self.terms}

    def pruned(self, threshold: float = DEFAULT_PRUNE) -> "PauliSum":
        return PauliSum(self.n_qubits, tuple(t for t in self.terms if abs(t.coefficient) >= threshold))

    def scaled(self, factor: complex) -> "PauliSum":
        return PauliSum(self.n_qubits, tuple(PauliTerm(factor * t.coefficient, t.word) for t in self.terms))

    @classmethod
    def identity(cls, n_qubits: int, coefficient: complex = 1.0) -> "PauliSum":
        return cls(n_qubits, (PauliTerm(coefficient, "I" * n_qubits),))


def _n_qubits_of(dim: int) -> int:
    n = dim.bit_length() - 1
    if dim < 1 or 2**n != dim:
        raise ValueError(f"matrix dimension {dim} is not a power of two")
    return n


def decompose(matrix, prune_threshold: float = DEFAULT_PRUNE) -> PauliSum:
    """Decompose a square matrix into Pauli words.

    Accepts dense arrays or scipy sparse matrices. Terms whose coefficient
    magnitude falls below ``prune_threshold`` are dropped.

    Raises:
        ValueError: if the matrix is not square with power-of-two dimension.
    """
    if sp.issparse(matrix):
        mat = sp.csr_matrix(matrix)
    else:
        mat = np.asarray(matrix)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {mat.shape}")
    dim = mat.shape[0]
    n = _n_qubits_of(dim)

    if sp.issparse(mat):
        coo = mat.tocoo()
        rows, cols, vals = coo.row, coo.col, coo.data.astype(complex)
    else:
        rows, cols = np.nonzero(mat)
        vals = mat[rows, cols].astype(complex)

    # Tr(P M) = sum_x <x|P M|x> = sum_{(r, c)} P[c, r] M[r, c]; P[c, r] is
    # nonzero only when r ^ c equals the word's flip mask, so group entries by
    # flip mask and only visit the 2^n words sharing it.
    flips = rows ^ cols
    terms = []
    for flip in np.unique(flips):
        sel = flips == flip
        r, v = rows[sel], vals[sel]
        for word in _words_with_flip(int(flip), n):
            _, phase = _pauli_action(word)
            # P|r> = phase[r] |r ^ flip> = phase[r] |c>, so P[c, r] = phase[r]
            coeff = np.sum(phase[r] * v) / dim
            if abs(coeff) >= prune_threshold and coeff != 0:
                terms.append(PauliTerm(complex(coeff), word))
    return PauliSum(n, tuple(terms))


def _words_with_flip(flip: int, n: int):
    choices = [("X", "Y") if (flip >> q) & 1 else ("I", "Z") for q in range(n)]
    for combo in itertools.product(*choices):
        yield "".join(combo)


def decompose_dense(matrix) -> PauliSum:
    """Reference decomposition via explicit ``Tr(P M)`` over all ``4^n`` words."""
    mat = np.asarray(matrix, dtype=complex)
    n = _n_qubits_of(mat.shape[0])
    terms = []
    for combo in itertools.product(PAULI_CHARS, repeat=n):
        word = "".join(combo)
        coeff = np.trace(pauli_matrix(word) @ mat) / mat.shape[0]
        if coeff != 0:
            terms.append(PauliTerm(coeff, word))
    return PauliSum(n, tuple(terms))


def reconstruct(psum: PauliSum) -> np.ndarray:
    """Dense matrix ``sum_P c_P P``."""
    dim = 2**psum.n_qubits
    out = np.zeros((dim, dim), dtype=complex)
    idx = np.arange(dim)
    for term in psum.terms:
        perm, phase = _pauli_action(term.word)
        out[perm, idx] += term.coefficient * phase
    return out


def matvec(psum: PauliSum, state) -> np.ndarray:
    """Apply the Pauli sum to a state (``StateVector`` or array); result is unnormalized."""
    amps = state.amplitudes if isinstance(state, StateVector) else np.asarray(state)
    if amps.size != 2**psum.n_qubits:
        raise ValueError(f"state of size {amps.size} does not match {psum.n_qubits} qubits")
    out = np.zeros(amps.size, dtype=complex)
    for term in psum.terms:
        perm, phase = _pauli_action(term.word)
        out[perm] += term.coefficient * phase * amps
    return out
