"""Photon loss and the balanced beam splitter acting on sparse Fock operators."""

from __future__ import annotations

import math
from dataclasses import dataclass, fields

import numpy as np
from scipy.special import comb

from .fock import FockDensityOperator, partial_trace, tensor
from .kravchuk import bs_amplitude_table


def _check_reflectivity(r: float, name: str = "r") -> None:
    if not 0.0 <= r <= 1.0:
        raise ValueError(f"{name} must lie in [0, 1], got {r}")


@dataclass(frozen=True)
class LossConfig:
    """Reflectivities of the virtual loss beam splitters (0 = lossless, 1 = fully blocked).

    ``a2``/``b2`` are the idlers sent to the Bell station, ``a1``/``b1`` the signals kept
    by Alice and Bob, and ``d1``/``d2`` sit in front of the two number-resolving detectors.
    """

    r_a2: float = 0.0
    r_b2: float = 0.0
    r_a1: float = 0.0
    r_b1: float = 0.0
    r_d1: float = 0.0
    r_d2: float = 0.0

    def __post_init__(self):
        for f in fields(self):
            _check_reflectivity(getattr(self, f.name), f.name)

    @classmethod
    def symmetric(cls, r_idler: float = 0.0, r_signal: float = 0.0, r_detector: float = 0.0) -> "LossConfig":
        return cls(r_idler, r_idler, r_signal, r_signal, r_detector, r_detector)

    def transmittance(self, name: str) -> float:
        return 1.0 - getattr(self, f"r_{name}")


def db_to_reflectivity(attenuation_db: float) -> float:
    """Power attenuation in dB to loss reflectivity, ``r = 1 - 10^(-dB/10)``."""
    if not attenuation_db >= 0:
        raise ValueError(f"attenuation must be nonnegative, got {attenuation_db} dB")
    return -math.expm1(-attenuation_db * math.log(10.0) / 10.0)


def db_to_transmittance(attenuation_db: float) -> float:
    if not attenuation_db >= 0:
        raise ValueError(f"attenuation must be nonnegative, got {attenuation_db} dB")
    return 10.0 ** (-attenuation_db / 10.0)


def loss_channel(rho: FockDensityOperator, mode: int, r: float) -> FockDensityOperator:
    """Lose each photon of ``mode`` with probability ``r``.

    Kraus kernel on occupation pairs:
    ``|n><n'| -> sum_p sqrt(C(n,p) C(n',p)) t^((n+n')/2 - p) r^p |n-p><n'-p|`` with ``t = 1 - r``.
    """
    _check_reflectivity(r)
    if not 0 <= mode < rho.mode_count:
        raise ValueError(f"mode {mode} out of range for {rho.mode_count} modes")
    if r == 0.0 or rho.is_empty:
        return rho
    t = 1.0 - r
    n = rho.kets[:, mode]
    n2 = rho.bras[:, mode]
    reach = np.minimum(n, n2)
    kets, bras, values = [], [], []
    for p in range(int(reach.max()) + 1):
        sel = reach >= p
        a, b = n[sel], n2[sel]
        coef = np.sqrt(comb(a, p) * comb(b, p)) * t ** ((a + b) / 2.0 - p) * r**p
        k = rho.kets[sel].copy()
        br = rho.bras[sel].copy()
        k[:, mode] -= p
        br[:, mode] -= p
        kets.append(k)
        bras.append(br)
        values.append(rho.values[sel] * coef)
    return FockDensityOperator(
        np.concatenate(kets), np.concatenate(bras), np.concatenate(values), rho.n_max, rho.mode_count
    )


def _loss_splitter(rho: FockDensityOperator, mode: int, ancilla: int, r: float) -> FockDensityOperator:
    # U |n, 0> = sum_p sqrt(C(n,p) t^(n-p) r^p) |n-p, p>  on (mode, ancilla); ancilla starts in vacuum
    t = 1.0 - r
    kets, bras, values = [], [], []
    n = rho.kets[:, mode]
    n2 = rho.bras[:, mode]
    for p in range(int(n.max(initial=0)) + 1):
        for q in range(int(n2.max(initial=0)) + 1):
            sel = (n >= p) & (n2 >= q)
            a, b = n[sel], n2[sel]
            coef = np.sqrt(comb(a, p) * t ** (a - p) * r**p) * np.sqrt(comb(b, q) * t ** (b - q) * r**q)
            k = rho.kets[sel].copy()
            br = rho.bras[sel].copy()
            k[:, mode] -= p
            k[:, ancilla] = p
            br[:, mode] -= q
            br[:, ancilla] = q
            kets.append(k)
            bras.append(br)
            values.append(rho.values[sel] * coef)
    return FockDensityOperator(
        np.concatenate(kets), np.concatenate(bras), np.concatenate(values), rho.n_max, rho.mode_count
    )


def loss_channel_ancilla(rho: FockDensityOperator, mode: int, r: float) -> FockDensityOperator:
    """Same channel as :func:`loss_channel`, built by coupling ``mode`` to a vacuum ancilla on a
    beam splitter of reflectivity ``r`` and tracing the ancilla out.  Used as an oracle."""
    _check_reflectivity(r)
    if not 0 <= mode < rho.mode_count:
        raise ValueError(f"mode {mode} out of range for {rho.mode_count} modes")
    extended = tensor(rho, FockDensityOperator.fock([0], n_max=rho.n_max))
    coupled = _loss_splitter(extended, mode, rho.mode_count, r)
    return partial_trace(coupled, [rho.mode_count])


def balanced_bs(rho: FockDensityOperator, mode_i: int, mode_j: int) -> FockDensityOperator:
    """Conjugate by the 50:50 beam splitter on ``(mode_i, mode_j)``.

    Acts block-wise in the total-photon-number sector of the pair, with
    ``U |n, S-n> = sum_k A_S(k, n) |k, S-k>``.
    """
    if mode_i == mode_j or not (0 <= mode_i < rho.mode_count and 0 <= mode_j < rho.mode_count):
        raise ValueError(f"need two distinct modes in range, got {mode_i}, {mode_j}")
    if rho.is_empty:
        return rho
    s_ket = rho.kets[:, mode_i] + rho.kets[:, mode_j]
    s_bra = rho.bras[:, mode_i] + rho.bras[:, mode_j]
    kets, bras, values = [], [], []
    for sk, sb in sorted(set(zip(s_ket.tolist(), s_bra.tolist()))):
        sel = np.flatnonzero((s_ket == sk) & (s_bra == sb))
        amp_k = bs_amplitude_table(sk).amplitudes
        amp_b = bs_amplitude_table(sb).amplitudes
        # block[e, kk, kb] = v_e A_sk(kk, n_e) conj(A_sb(kb, n'_e))
        block = (
            rho.values[sel][:, None, None]
            * amp_k[:, rho.kets[sel, mode_i]].T[:, :, None]
            * amp_b[:, rho.bras[sel, mode_i]].T.conj()[:, None, :]
        )
        m = len(sel)
        kk = np.broadcast_to(np.arange(sk + 1)[None, :, None], block.shape).reshape(-1)
        kb = np.broadcast_to(np.arange(sb + 1)[None, None, :], block.shape).reshape(-1)
        rows = np.repeat(np.arange(m), (sk + 1) * (sb + 1))
        k = rho.kets[sel][rows].copy()
        br = rho.bras[sel][rows].copy()
        k[:, mode_i] = kk
        k[:, mode_j] = sk - kk
        br[:, mode_i] = kb
        br[:, mode_j] = sb - kb
        kets.append(k)
        bras.append(br)
        values.append(block.reshape(-1))
    return FockDensityOperator(
        np.concatenate(kets), np.concatenate(bras), np.concatenate(values), rho.n_max, rho.mode_count
    )
