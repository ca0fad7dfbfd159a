"""Logarithmic negativity and quantum Fisher information."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .fock import FockDensityOperator, InvariantViolation, _encode
from .kravchuk import kravchuk_table, photon_distribution

TRACE_TOL = 1e-10


@dataclass(frozen=True)
class BipartiteSplit:
    """Disjoint mode sets ``modes_A | modes_B``."""

    modes_A: tuple[int, ...]
    modes_B: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "modes_A", tuple(int(m) for m in self.modes_A))
        object.__setattr__(self, "modes_B", tuple(int(m) for m in self.modes_B))
        if set(self.modes_A) & set(self.modes_B):
            raise ValueError("modes_A and modes_B overlap")

    def validate(self, mode_count: int) -> None:
        if sorted(self.modes_A + self.modes_B) != list(range(mode_count)):
            raise ValueError(f"split {self} does not cover the {mode_count} modes exactly")

    def swapped(self) -> "BipartiteSplit":
        return BipartiteSplit(self.modes_B, self.modes_A)


def partial_transpose(rho: FockDensityOperator, modes: Sequence[int]) -> FockDensityOperator:
    """Transpose the occupations of ``modes`` between ket and bra."""
    modes = list(modes)
    kets = rho.kets.copy()
    bras = rho.bras.copy()
    kets[:, modes] = rho.bras[:, modes]
    bras[:, modes] = rho.kets[:, modes]
    return FockDensityOperator(kets, bras, rho.values, rho.n_max, rho.mode_count)


def hermitian_block_eigenvalues(op: FockDensityOperator) -> np.ndarray:
    """Eigenvalues of a Hermitian sparse operator, solved block by block.

    Blocks are the connected components of the entry graph on basis states; each
    block is symmetrized and handed to a dense Hermitian eigensolver.
    """
    if op.is_empty:
        return np.zeros(0)
    both = np.concatenate([op.kets, op.bras])
    keys = _encode(both, np.zeros((len(both), 0), dtype=np.int64))
    basis, inverse = np.unique(keys, return_inverse=True)
    rows, cols = inverse[: len(op)], inverse[len(op):]
    dim = len(basis)
    graph = coo_matrix((np.ones(len(op)), (rows, cols)), shape=(dim, dim))
    n_blocks, labels = connected_components(graph, directed=False)
    order = np.argsort(labels, kind="stable")
    local = np.empty(dim, dtype=np.int64)
    counts = np.bincount(labels, minlength=n_blocks)
    starts = np.concatenate([[0], np.cumsum(counts)[:-1]])
    for block in range(n_blocks):
        members = order[starts[block]: starts[block] + counts[block]]
        local[members] = np.arange(len(members))
    entry_block = labels[rows]
    eigenvalues = []
    entry_order = np.argsort(entry_block, kind="stable")
    entry_counts = np.bincount(entry_block, minlength=n_blocks)
    entry_starts = np.concatenate([[0], np.cumsum(entry_counts)[:-1]])
    for block in range(n_blocks):
        idx = entry_order[entry_starts[block]: entry_starts[block] + entry_counts[block]]
        size = counts[block]
        mat = np.zeros((size, size), dtype=np.complex128)
        np.add.at(mat, (local[rows[idx]], local[cols[idx]]), op.values[idx])
        eigenvalues.append(np.linalg.eigvalsh(0.5 * (mat + mat.conj().T)))
    return np.concatenate(eigenvalues)


def _checked_trace(rho: FockDensityOperator) -> float:
    tr = rho.trace()
    if abs(tr - 1.0) > TRACE_TOL:
        raise InvariantViolation(f"log negativity needs a unit-trace state, got trace {tr!r}")
    return tr


def log_negativity(rho: FockDensityOperator, split: BipartiteSplit) -> float:
    """``E_N = log2(1 + 2 sum_k (|a_k| - a_k) / 2)`` over eigenvalues ``a_k`` of the partial transpose."""
    split.validate(rho.mode_count)
    _checked_trace(rho)
    alphas = hermitian_block_eigenvalues(partial_transpose(rho, split.modes_B))
    negative_mass = float(np.sum(np.abs(alphas) - alphas) / 2.0)
    return max(0.0, math.log2(1.0 + 2.0 * negative_mass))


def log_negativity_trace_norm(rho: FockDensityOperator, split: BipartiteSplit) -> float:
    """``E_N = log2 ||rho^Gamma||_1``; equals :func:`log_negativity` for unit trace."""
    split.validate(rho.mode_count)
    _checked_trace(rho)
    alphas = hermitian_block_eigenvalues(partial_transpose(rho, split.modes_B))
    return max(0.0, math.log2(float(np.abs(alphas).sum())))


def log_negativity_pure_closed(S: int, k: int) -> float:
    """Closed-form ``E_N = 2 log2 sum_n |phi_k(n - S/2, S)|`` of the lossless output state."""
    if not 0 <= k <= S:
        raise ValueError(f"need 0 <= k <= S, got k={k}, S={S}")
    return 2.0 * math.log2(float(np.abs(kravchuk_table(S)[k]).sum()))


def qfi_pure(S: int, k: int) -> float:
    """Quantum Fisher information ``4 Var(n)`` of the lossless output state for a phase on one arm."""
    if not 0 <= k <= S:
        raise ValueError(f"need 0 <= k <= S, got k={k}, S={S}")
    p = photon_distribution(S, k)
    n = np.arange(S + 1)
    mean = float(p @ n)
    return max(0.0, 4.0 * float(p @ (n - mean) ** 2))


def en_reference(S: int) -> tuple[float, float]:
    """``(log2(S+1), 1.0)``: maximally entangled value in dimension S+1 and the two-photon Bell value."""
    if S < 0:
        raise ValueError(f"S must be nonnegative, got {S}")
    return math.log2(S + 1), 1.0


def en_max_alternative(S: int) -> float:
    """Alternative reference ``log2(2 sqrt(S+1) + 1)`` quoted for the unsymmetric-loss plots.

    It disagrees with ``log2(S+1)``; exposed only for labelling, never used as a bound.
    """
    return math.log2(2.0 * math.sqrt(S + 1) + 1.0)
