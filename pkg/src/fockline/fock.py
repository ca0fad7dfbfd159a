"""Sector-sparse density operators in the multimode Fock basis.

An operator is a list of entries ``value * |ket><bra|`` where ``ket`` and ``bra``
are occupation tuples, one photon count per mode.  Entries are kept in three
parallel numpy arrays and coalesced on construction, so that all operations are
vectorized and only the nonzero number sectors are ever stored.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

HERMITICITY_TOL = 1e-12
PSD_TOL = 1e-10


class InvariantViolation(RuntimeError):
    """A numerical invariant (normalization, Hermiticity, an exact identity) failed."""


@dataclass(frozen=True)
class SchmidtSpectrum:
    """Truncated Schmidt weights ``lambda_n = tanh^{2n}(g) / cosh^2(g)`` of a two-mode squeezed vacuum."""

    g: float
    n_max: int
    weights: np.ndarray

    @property
    def tail_deficit(self) -> float:
        """Probability mass dropped by the cutoff, ``1 - sum(weights)``, computed in closed form."""
        return math.tanh(self.g) ** (2 * (self.n_max + 1))

    @property
    def mean_photon_number(self) -> float:
        return 2.0 * math.sinh(self.g) ** 2


def schmidt_cutoff(g: float, tol: float = 1e-15) -> int:
    """Smallest ``n_max`` with ``lambda_{n_max} / lambda_0 = tanh^{2 n_max}(g) < tol``.

    For ``tol >= 1`` the answer is 1 (the ratio is 1 at n = 0).
    """
    if not g > 0:
        raise ValueError(f"gain must be positive, got {g}")
    if not tol > 0:
        raise ValueError(f"tol must be positive, got {tol}")
    if tol >= 1:
        return 1
    log_ratio = 2.0 * math.log(math.tanh(g))
    n = max(1, math.floor(math.log(tol) / log_ratio))
    # guard the floating boundary on both sides
    while n > 1 and (n - 1) * log_ratio < math.log(tol):
        n -= 1
    while n * log_ratio >= math.log(tol):
        n += 1
    return n


def schmidt_weights(g: float, n_max: int) -> SchmidtSpectrum:
    if not g > 0:
        raise ValueError(f"gain must be positive, got {g}")
    if n_max < 0:
        raise ValueError(f"n_max must be nonnegative, got {n_max}")
    n = np.arange(n_max + 1)
    weights = np.tanh(g) ** (2 * n) / np.cosh(g) ** 2
    weights.setflags(write=False)
    return SchmidtSpectrum(g=float(g), n_max=int(n_max), weights=weights)


def _encode(kets: np.ndarray, bras: np.ndarray) -> np.ndarray:
    rows = np.concatenate([kets, bras], axis=1).astype(np.int64)
    if rows.shape[1] == 0:
        return np.zeros(rows.shape[0], dtype=np.int64)
    radix = int(rows.max(initial=0)) + 1
    if radix ** rows.shape[1] >= 2**62:
        raise OverflowError("occupation range too large for sector key encoding")
    keys = np.zeros(rows.shape[0], dtype=np.int64)
    for col in range(rows.shape[1]):
        keys = keys * radix + rows[:, col]
    return keys


def _coalesce(kets, bras, values):
    if len(values) == 0:
        return kets, bras, values
    keys = _encode(kets, bras)
    uniq, first, inverse = np.unique(keys, return_index=True, return_inverse=True)
    summed = np.bincount(inverse, weights=values.real, minlength=len(uniq)) + 1j * np.bincount(
        inverse, weights=values.imag, minlength=len(uniq)
    )
    keep = summed != 0
    return kets[first][keep], bras[first][keep], summed[keep]


class FockDensityOperator:
    """Immutable sparse operator ``sum_e values[e] |kets[e]><bras[e]|``.

    ``n_max`` is the per-mode cutoff of the sources the operator was built from;
    stored entries never carry more than ``4 * n_max`` photons in ket or bra.
    A trace below one marks a conditional branch whose probability is the trace.
    """

    __slots__ = ("kets", "bras", "values", "n_max", "mode_count", "trace_cache")

    def __init__(self, kets, bras, values, n_max: int, mode_count: int | None = None):
        values = np.asarray(values, dtype=np.complex128).reshape(-1)
        if mode_count is None:
            mode_count = np.shape(kets)[1] if len(values) else 0
        kets = np.asarray(kets, dtype=np.int64).reshape(len(values), mode_count)
        bras = np.asarray(bras, dtype=np.int64).reshape(len(values), mode_count)
        if kets.size and (kets.min() < 0 or bras.min() < 0):
            raise ValueError("occupations must be nonnegative")
        if kets.size and max(kets.sum(axis=1).max(), bras.sum(axis=1).max()) > 4 * n_max:
            raise InvariantViolation(f"entry exceeds the 4*n_max = {4 * n_max} photon sector bound")
        kets, bras, values = _coalesce(kets, bras, values)
        for arr in (kets, bras, values):
            arr.setflags(write=False)
        self.kets = kets
        self.bras = bras
        self.values = values
        self.n_max = int(n_max)
        self.mode_count = int(mode_count)
        diag = np.all(kets == bras, axis=1)
        self.trace_cache = float(values[diag].real.sum())

    @classmethod
    def from_entries(cls, entries: Mapping[tuple, complex], n_max: int, mode_count: int | None = None):
        """Build from ``{(ket_tuple, bra_tuple): value}``."""
        items = list(entries.items())
        if mode_count is None:
            mode_count = len(items[0][0][0]) if items else 0
        kets = [ket for (ket, _), _ in items]
        bras = [bra for (_, bra), _ in items]
        return cls(kets, bras, [v for _, v in items], n_max=n_max, mode_count=mode_count)

    @classmethod
    def empty(cls, mode_count: int, n_max: int) -> "FockDensityOperator":
        return cls(np.zeros((0, mode_count)), np.zeros((0, mode_count)), [], n_max=n_max, mode_count=mode_count)

    @classmethod
    def fock(cls, occupations: Sequence[int], n_max: int | None = None) -> "FockDensityOperator":
        occ = [int(o) for o in occupations]
        return cls([occ], [occ], [1.0], n_max=max(occ, default=0) if n_max is None else n_max, mode_count=len(occ))

    @classmethod
    def from_ket(cls, amplitudes: Mapping[tuple, complex], n_max: int) -> "FockDensityOperator":
        """Pure state ``|psi><psi|`` from ``{occupation_tuple: amplitude}``."""
        items = [(occ, complex(a)) for occ, a in amplitudes.items() if a != 0]
        kets = np.array([occ for occ, _ in items for _ in items])
        bras = np.array([occ for _ in items for occ, _ in items])
        amps = np.array([a for _, a in items])
        values = np.outer(amps, amps.conj()).reshape(-1)
        mode_count = len(next(iter(amplitudes)))
        return cls(kets.reshape(-1, mode_count), bras.reshape(-1, mode_count), values, n_max=n_max, mode_count=mode_count)

    def __len__(self) -> int:
        return len(self.values)

    def __repr__(self) -> str:
        return (
            f"FockDensityOperator(modes={self.mode_count}, n_max={self.n_max}, "
            f"entries={len(self)}, trace={self.trace_cache:.6g})"
        )

    @property
    def is_empty(self) -> bool:
        return len(self.values) == 0

    @property
    def entries(self) -> dict[tuple[tuple[int, ...], tuple[int, ...]], complex]:
        return {
            (tuple(map(int, k)), tuple(map(int, b))): complex(v)
            for k, b, v in zip(self.kets, self.bras, self.values)
        }

    def trace(self) -> float:
        return self.trace_cache

    def entry(self, ket: Sequence[int], bra: Sequence[int]) -> complex:
        mask = np.all(self.kets == np.asarray(ket), axis=1) & np.all(self.bras == np.asarray(bra), axis=1)
        return complex(self.values[mask].sum())

    def scaled(self, factor: float) -> "FockDensityOperator":
        return FockDensityOperator(self.kets, self.bras, self.values * factor, self.n_max, self.mode_count)

    def normalized(self) -> "FockDensityOperator":
        tr = self.trace()
        if tr <= 0:
            raise InvariantViolation("cannot normalize an operator with nonpositive trace")
        return self.scaled(1.0 / tr)

    def basis(self) -> list[tuple[int, ...]]:
        """Sorted list of occupation tuples appearing in any ket or bra."""
        rows = np.unique(np.concatenate([self.kets, self.bras]), axis=0)
        return [tuple(map(int, r)) for r in rows]

    def to_dense(self, basis: Sequence[tuple[int, ...]] | None = None) -> tuple[np.ndarray, list]:
        """Dense matrix on ``basis`` (default: the operator's own support)."""
        basis = self.basis() if basis is None else [tuple(b) for b in basis]
        index = {b: i for i, b in enumerate(basis)}
        mat = np.zeros((len(basis), len(basis)), dtype=np.complex128)
        for k, b, v in zip(self.kets, self.bras, self.values):
            mat[index[tuple(map(int, k))], index[tuple(map(int, b))]] += v
        return mat, basis

    def mean_photon_number(self, mode: int) -> float:
        diag = np.all(self.kets == self.bras, axis=1)
        return float((self.values[diag].real * self.kets[diag, mode]).sum())

    def hermiticity_error(self) -> float:
        adjoint = FockDensityOperator(self.bras, self.kets, self.values.conj(), self.n_max, self.mode_count)
        return max_entry_difference(self, adjoint)


def max_entry_difference(a: FockDensityOperator, b: FockDensityOperator) -> float:
    """Largest absolute entrywise difference of two operators on the same modes."""
    if a.mode_count != b.mode_count:
        raise ValueError("operators act on different numbers of modes")
    diff = FockDensityOperator(
        np.concatenate([a.kets, b.kets]),
        np.concatenate([a.bras, b.bras]),
        np.concatenate([a.values, -b.values]),
        n_max=max(a.n_max, b.n_max),
        mode_count=a.mode_count,
    )
    return float(np.abs(diff.values).max(initial=0.0))


def check_physical(rho: FockDensityOperator) -> None:
    """Raise :class:`InvariantViolation` unless ``rho`` is Hermitian, PSD and has trace in (0, 1]."""
    herm = rho.hermiticity_error()
    if herm > HERMITICITY_TOL:
        raise InvariantViolation(f"operator is not Hermitian (max deviation {herm:.3e})")
    tr = rho.trace()
    if not 0 < tr <= 1 + 1e-12:
        raise InvariantViolation(f"trace {tr!r} outside (0, 1]")
    mat, _ = rho.to_dense()
    smallest = float(np.linalg.eigvalsh(0.5 * (mat + mat.conj().T)).min())
    if smallest < -PSD_TOL * tr:
        raise InvariantViolation(f"operator is not positive semidefinite (eigenvalue {smallest:.3e})")


def sv_pure_state(spectrum: SchmidtSpectrum) -> FockDensityOperator:
    """``|Psi><Psi|`` with ``|Psi> = sum_n sqrt(lambda_n) |n, n>`` on two modes."""
    amps = np.sqrt(spectrum.weights)
    n = np.arange(spectrum.n_max + 1)
    ket_n = np.repeat(n, len(n))
    bra_n = np.tile(n, len(n))
    kets = np.stack([ket_n, ket_n], axis=1)
    bras = np.stack([bra_n, bra_n], axis=1)
    return FockDensityOperator(kets, bras, np.outer(amps, amps).reshape(-1), n_max=spectrum.n_max, mode_count=2)


def tensor(rho_a: FockDensityOperator, rho_b: FockDensityOperator) -> FockDensityOperator:
    """``rho_a (x) rho_b`` with the modes of ``rho_a`` first."""
    na, nb = len(rho_a), len(rho_b)
    kets = np.concatenate([np.repeat(rho_a.kets, nb, axis=0), np.tile(rho_b.kets, (na, 1))], axis=1)
    bras = np.concatenate([np.repeat(rho_a.bras, nb, axis=0), np.tile(rho_b.bras, (na, 1))], axis=1)
    values = np.outer(rho_a.values, rho_b.values).reshape(-1)
    return FockDensityOperator(
        kets, bras, values, n_max=max(rho_a.n_max, rho_b.n_max), mode_count=rho_a.mode_count + rho_b.mode_count
    )


def permute_modes(rho: FockDensityOperator, order: Sequence[int]) -> FockDensityOperator:
    """Reorder modes: new mode ``i`` is old mode ``order[i]``."""
    order = list(order)
    if sorted(order) != list(range(rho.mode_count)):
        raise ValueError(f"{order} is not a permutation of the {rho.mode_count} modes")
    return FockDensityOperator(rho.kets[:, order], rho.bras[:, order], rho.values, rho.n_max, rho.mode_count)


def partial_trace(rho: FockDensityOperator, modes_to_drop: Iterable[int]) -> FockDensityOperator:
    """Trace out ``modes_to_drop``.  Dropping every mode leaves a 0-mode operator holding the trace."""
    drop = sorted(set(modes_to_drop))
    if any(m < 0 or m >= rho.mode_count for m in drop):
        raise ValueError(f"modes {drop} out of range for {rho.mode_count} modes")
    keep = [m for m in range(rho.mode_count) if m not in drop]
    diag = np.all(rho.kets[:, drop] == rho.bras[:, drop], axis=1)
    return FockDensityOperator(
        rho.kets[diag][:, keep], rho.bras[diag][:, keep], rho.values[diag], rho.n_max, mode_count=len(keep)
    )


@dataclass(frozen=True)
class FockProjector:
    """Projector onto fixed photon numbers ``occupations`` in ``mode_indices``."""

    mode_indices: tuple[int, ...]
    occupations: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "mode_indices", tuple(int(m) for m in self.mode_indices))
        object.__setattr__(self, "occupations", tuple(int(o) for o in self.occupations))
        if len(self.mode_indices) != len(self.occupations):
            raise ValueError("mode_indices and occupations differ in length")
        if len(set(self.mode_indices)) != len(self.mode_indices):
            raise ValueError("mode_indices must be distinct")
        if any(o < 0 for o in self.occupations):
            raise ValueError("occupations must be nonnegative")


def project(rho: FockDensityOperator, projector: FockProjector) -> FockDensityOperator:
    """Unnormalized ``<occ| rho |occ>`` on the remaining modes; its trace is the branch weight."""
    modes = list(projector.mode_indices)
    if any(m < 0 or m >= rho.mode_count for m in modes):
        raise ValueError(f"projector modes {modes} out of range for {rho.mode_count} modes")
    occ = np.asarray(projector.occupations)
    hit = np.all(rho.kets[:, modes] == occ, axis=1) & np.all(rho.bras[:, modes] == occ, axis=1)
    keep = [m for m in range(rho.mode_count) if m not in modes]
    return FockDensityOperator(
        rho.kets[hit][:, keep], rho.bras[hit][:, keep], rho.values[hit], rho.n_max, mode_count=len(keep)
    )


def project_and_renormalize(
    rho: FockDensityOperator, projector: FockProjector
) -> tuple[FockDensityOperator, float]:
    """Project, then renormalize to unit trace.

    Returns ``(state, probability)`` with ``probability = tr(P rho P) / tr(rho)``.  A
    zero-probability outcome returns an empty operator (``state.is_empty``) and 0.0.
    """
    branch = project(rho, projector)
    weight = branch.trace()
    if weight <= 0 or branch.is_empty:
        return FockDensityOperator.empty(branch.mode_count, rho.n_max), 0.0
    return branch.scaled(1.0 / weight), weight / rho.trace()
