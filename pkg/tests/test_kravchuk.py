import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fockline.kravchuk import (
    arcsine_envelope,
    bs_amplitude,
    bs_amplitude_table,
    kravchuk_fn,
    kravchuk_poly,
    kravchuk_table,
    photon_distribution,
)


def exact_phi_squared(k, n, S):
    """|phi_k(n - S/2, S)|^2 as an exact rational from integer Kravchuk coefficients."""
    kk = sum((-1) ** j * math.comb(n, j) * math.comb(S - n, k - j) for j in range(0, k + 1))
    return Fraction(math.comb(S, n) * kk * kk, 2**S * math.comb(S, k))


def bosonic_amplitudes(S):
    """<k, S-k| U |n, S-n> by expanding (a - i b)^n (-i a + b)^(S-n) / sqrt(2^S n! (S-n)!)."""
    table = np.zeros((S + 1, S + 1), dtype=complex)
    for n in range(S + 1):
        m = S - n
        # coefficient of a^k b^(S-k) in the product of the two binomials
        coeffs = np.zeros(S + 1, dtype=complex)
        for j in range(n + 1):  # a^(n-j) (-i b)^j
            for l in range(m + 1):  # (-i a)^(m-l) b^l
                ka = (n - j) + (m - l)
                coeffs[ka] += math.comb(n, j) * (-1j) ** j * math.comb(m, l) * (-1j) ** (m - l)
        for k in range(S + 1):
            norm = math.sqrt(math.factorial(k) * math.factorial(S - k) / (2**S * math.factorial(n) * math.factorial(m)))
            table[k, n] = coeffs[k] * norm
    return table


def test_degree_zero_polynomial_is_one():
    for S in range(8):
        for n in range(S + 1):
            assert kravchuk_poly(0, n, S) == 1.0


def test_polynomial_values():
    # K_1(n; S) = S - 2n
    assert [kravchuk_poly(1, n, 4) for n in range(5)] == [4.0, 2.0, 0.0, -2.0, -4.0]
    assert [kravchuk_poly(2, n, 4) for n in range(5)] == [6.0, 0.0, -2.0, 0.0, 6.0]


@pytest.mark.parametrize("args", [(-1, 0, 3), (4, 0, 3), (0, 4, 3), (0, -1, 3)])
def test_out_of_range_indices(args):
    with pytest.raises(ValueError):
        kravchuk_poly(*args)
    with pytest.raises(ValueError):
        kravchuk_fn(*args)


def test_phi0_is_binomial_root():
    np.testing.assert_allclose(kravchuk_table(4)[0] ** 2, np.array([1, 4, 6, 4, 1]) / 16, atol=1e-15)
    assert np.all(kravchuk_table(4)[0] > 0)


def test_exact_rational_oracle():
    for S in range(31):
        table = kravchuk_table(S)
        for k in range(S + 1):
            for n in range(S + 1):
                exact = float(exact_phi_squared(k, n, S))
                assert table[k, n] ** 2 == pytest.approx(exact, rel=1e-12, abs=1e-26)


def test_sign_changes_match_degree():
    table = kravchuk_table(4)
    for k in range(5):
        signs = np.sign(table[k][np.abs(table[k]) > 1e-14])
        assert np.count_nonzero(np.diff(signs)) == k


def test_hom_null():
    assert kravchuk_fn(1, 1, 2) == 0.0
    assert bs_amplitude(2, 1, 1) == 0
    assert abs(bs_amplitude(2, 1, 0)) ** 2 == pytest.approx(0.5, abs=1e-15)
    assert abs(bs_amplitude(2, 1, 2)) ** 2 == pytest.approx(0.5, abs=1e-15)


@pytest.mark.parametrize("S", range(0, 9))
def test_amplitudes_match_bosonic_expansion(S):
    np.testing.assert_allclose(bs_amplitude_table(S).amplitudes, bosonic_amplitudes(S), atol=1e-13)


def test_three_term_recurrence_residual():
    for S in range(1, 51):
        phi = kravchuk_table(S)
        psi = phi * np.where(np.arange(S + 1) % 2 == 0, 1.0, -1.0)[:, None]
        n = np.arange(S + 1)
        for k in range(S + 1):
            lhs = (S - 2 * n) * psi[k]
            rhs = np.zeros(S + 1)
            if k + 1 <= S:
                rhs += math.sqrt((k + 1) * (S - k)) * psi[k + 1]
            if k >= 1:
                rhs += math.sqrt(k * (S - k + 1)) * psi[k - 1]
            assert np.max(np.abs(lhs - rhs)) < 1e-10


def test_orthonormality_up_to_200():
    for S in list(range(0, 60)) + [99, 100, 150, 199, 200]:
        phi = kravchuk_table(S)
        eye = np.eye(S + 1)
        assert np.max(np.abs(phi @ phi.T - eye)) < 1e-10
        assert np.max(np.abs(phi.T @ phi - eye)) < 1e-10


def test_finite_at_large_order():
    phi = kravchuk_table(1000)
    assert np.all(np.isfinite(phi))
    assert np.max(np.abs(phi @ phi.T - np.eye(1001))) < 1e-10


def test_unitarity_up_to_100():
    for S in range(0, 101):
        a = bs_amplitude_table(S).amplitudes
        eye = np.eye(S + 1)
        assert np.max(np.abs(a @ a.conj().T - eye)) < 1e-12
        assert np.max(np.abs(a.conj().T @ a - eye)) < 1e-12
        p = bs_amplitude_table(S).probabilities()
        np.testing.assert_allclose(p.sum(axis=0), 1.0, atol=1e-12)
        np.testing.assert_allclose(p.sum(axis=1), 1.0, atol=1e-12)


@settings(max_examples=60, deadline=None)
@given(S=st.integers(0, 50), data=st.data())
def test_mode_swap_symmetry(S, data):
    k = data.draw(st.integers(0, S))
    np.testing.assert_allclose(photon_distribution(S, k), photon_distribution(S, S - k)[::-1], atol=1e-13)


def test_photon_distribution_examples():
    np.testing.assert_allclose(photon_distribution(4, 0), np.array([1, 4, 6, 4, 1]) / 16, atol=1e-15)
    np.testing.assert_allclose(photon_distribution(2, 1), [0.5, 0.0, 0.5], atol=1e-15)
    for S in (1, 7, 30):
        for k in range(S + 1):
            p = photon_distribution(S, k)
            assert np.all(p >= 0)
            assert p.sum() == pytest.approx(1.0, abs=1e-12)


def test_arcsine_envelope():
    S = 100
    assert arcsine_envelope(S, S / 2) == pytest.approx(4 / (math.pi * S), rel=1e-15)
    assert arcsine_envelope(S, 0) == math.inf
    assert arcsine_envelope(S, S) == math.inf
    assert arcsine_envelope(S, 30) == pytest.approx(arcsine_envelope(S, 70), rel=1e-14)
    p = photon_distribution(S, S // 2)
    for n in range(5, 96):
        if p[n] >= p[n - 1] and p[n] >= p[n + 1]:
            assert p[n] < 1.05 * arcsine_envelope(S, n)
