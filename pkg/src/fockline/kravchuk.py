"""Kravchuk polynomials, symmetric Kravchuk functions and balanced beam-splitter amplitudes.

The beam splitter convention is the creation-operator map

    a^dag -> (a^dag - i b^dag) / sqrt(2),    b^dag -> (-i a^dag + b^dag) / sqrt(2)

and ``A_S(k, n) = <k, S-k| U |n, S-n>``.  With the standard integer-coefficient
Kravchuk polynomial

    K_k(n; S) = sum_j (-1)^j C(n, j) C(S-n, k-j)

the amplitudes factor as ``A_S(k, n) = i^(n-k) (-1)^(k+n) phi_k(n - S/2, S)`` with

    phi_k(n - S/2, S) = (-1)^k sqrt(C(S, n) / (2^S C(S, k))) K_k(n; S).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

# i^m for m mod 4; keeps the phases exact so that destructive interference gives exact zeros
_I_POWERS = np.array([1.0 + 0.0j, 1.0j, -1.0 + 0.0j, -1.0j])


def _check_indices(k: int, n: int, S: int) -> None:
    if S < 0 or not (0 <= k <= S) or not (0 <= n <= S):
        raise ValueError(f"indices out of range: k={k}, n={n}, S={S} (need 0 <= k, n <= S)")


def kravchuk_poly(k: int, n: int, S: int) -> float:
    """Integer-coefficient Kravchuk polynomial ``K_k(n; S)`` for p = 1/2.

    Evaluated exactly in integer arithmetic and rounded once to float.
    """
    _check_indices(k, n, S)
    total = 0
    for j in range(max(0, k - (S - n)), min(n, k) + 1):
        term = math.comb(n, j) * math.comb(S - n, k - j)
        total += -term if j % 2 else term
    return float(total)


@lru_cache(maxsize=256)
def _kravchuk_table(S: int) -> np.ndarray:
    # Orthonormal three-term recurrence in k for psi_k(n) = (-1)^k phi_k(n - S/2, S):
    #   sqrt((k+1)(S-k)) psi_{k+1} = (S - 2n) psi_k - sqrt(k(S-k+1)) psi_{k-1}
    # psi_0 is the square root of the binomial law, seeded via log-gamma.
    n = np.arange(S + 1)
    log_binom = (
        math.lgamma(S + 1)
        - np.array([math.lgamma(i + 1) + math.lgamma(S - i + 1) for i in range(S + 1)])
        - S * math.log(2.0)
    )
    # The recurrence is only stable while psi grows in k, i.e. up to k = S/2; the rest
    # follows from psi_{S-k}(n) = (-1)^n psi_k(n).
    half = S // 2
    psi = np.empty((S + 1, S + 1))
    psi[0] = np.exp(0.5 * log_binom)
    if half >= 1:
        psi[1] = (S - 2 * n) * psi[0] / math.sqrt(S)
    for k in range(1, half):
        psi[k + 1] = ((S - 2 * n) * psi[k] - math.sqrt(k * (S - k + 1)) * psi[k - 1]) / math.sqrt(
            (k + 1) * (S - k)
        )
    parity = np.where(n % 2 == 0, 1.0, -1.0)
    for k in range(half + 1, S + 1):
        psi[k] = parity * psi[S - k]
    signs = np.where(np.arange(S + 1) % 2 == 0, 1.0, -1.0)
    table = signs[:, None] * psi
    table.setflags(write=False)
    return table


def kravchuk_table(S: int) -> np.ndarray:
    """Matrix ``phi[k, n] = phi_k(n - S/2, S)`` for k, n = 0..S (read-only, cached)."""
    if S < 0:
        raise ValueError(f"S must be nonnegative, got {S}")
    return _kravchuk_table(int(S))


def kravchuk_fn(k: int, n: int, S: int) -> float:
    """Symmetric Kravchuk function ``phi_k(n - S/2, S)``."""
    _check_indices(k, n, S)
    return float(kravchuk_table(S)[k, n])


@dataclass(frozen=True)
class BsAmplitudeTable:
    """Balanced beam-splitter amplitudes in the total-photon-number-``S`` sector.

    ``amplitudes[k, n] = <k, S-k| U |n, S-n>``: rows are readouts, columns input splits.
    """

    S: int
    amplitudes: np.ndarray

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2


@lru_cache(maxsize=256)
def _bs_table(S: int) -> BsAmplitudeTable:
    k = np.arange(S + 1)[:, None]
    n = np.arange(S + 1)[None, :]
    # e^{i pi (n-k)/2} (-1)^{k+n} = i^{(n-k) + 2(k+n)} = i^{3n + k}
    phase = _I_POWERS[(3 * n + k) % 4]
    amps = phase * kravchuk_table(S)
    amps.setflags(write=False)
    return BsAmplitudeTable(S=S, amplitudes=amps)


def bs_amplitude_table(S: int) -> BsAmplitudeTable:
    if S < 0:
        raise ValueError(f"S must be nonnegative, got {S}")
    return _bs_table(int(S))


def bs_amplitude(S: int, k: int, n: int) -> complex:
    """``A_S(k, n)``: amplitude for ``|n, S-n> -> |k, S-k>`` through the balanced beam splitter."""
    _check_indices(k, n, S)
    return complex(bs_amplitude_table(S).amplitudes[k, n])


def photon_distribution(S: int, k: int) -> np.ndarray:
    """Photon-number distribution ``p(n) = |A_S(k, n)|^2`` of the conditional output state."""
    _check_indices(k, 0, S)
    p = kravchuk_table(S)[k] ** 2
    return p / p.sum() if S > 0 else p.copy()


def arcsine_envelope(S: int, n: float) -> float:
    """Arcsine envelope ``4 / (pi S sqrt(1 - (2n/S - 1)^2))`` of ``p^(S/2, S)(n)``.

    Returns ``inf`` at and beyond the endpoints ``n <= 0`` or ``n >= S``.
    """
    if S <= 0:
        raise ValueError(f"S must be positive, got {S}")
    if n <= 0 or n >= S:
        return math.inf
    x = 2.0 * n / S - 1.0
    return 4.0 / (math.pi * S * math.sqrt(1.0 - x * x))
