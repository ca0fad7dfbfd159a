import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fockline.fock import FockDensityOperator, InvariantViolation, schmidt_weights, sv_pure_state
from fockline.measures import (
    BipartiteSplit,
    en_max_alternative,
    en_reference,
    log_negativity,
    log_negativity_pure_closed,
    log_negativity_trace_norm,
    partial_transpose,
    qfi_pure,
)
from fockline.protocol import lossless_output_state

AB = BipartiteSplit((0,), (1,))


def test_product_state_is_zero():
    assert log_negativity(FockDensityOperator.fock([0, 0]), AB) == 0.0


def test_two_photon_bell_pair():
    bell = FockDensityOperator.from_ket({(0, 2): 1 / math.sqrt(2), (2, 0): 1 / math.sqrt(2)}, n_max=2)
    assert log_negativity(bell, AB) == pytest.approx(1.0, abs=1e-12)


def test_maximally_entangled_dimension_five():
    state = FockDensityOperator.from_ket({(n, 4 - n): 1 / math.sqrt(5) for n in range(5)}, n_max=4)
    assert log_negativity(state, AB) == pytest.approx(math.log2(5), abs=1e-12)
    assert log_negativity(state, AB) == pytest.approx(2.3219, abs=1e-4)


def test_two_mode_squeezed_vacuum():
    g = 0.3
    rho = sv_pure_state(schmidt_weights(g, 60)).normalized()
    # pure-state E_N = 2 log2 sum sqrt(lambda_n) = 2 log2(e^g)
    assert log_negativity(rho, AB) == pytest.approx(2 * g / math.log(2), abs=1e-10)


def test_unit_trace_required():
    with pytest.raises(InvariantViolation):
        log_negativity(FockDensityOperator.fock([0, 0]).scaled(0.5), AB)


def test_split_validation():
    with pytest.raises(ValueError):
        BipartiteSplit((0, 1), (1,))
    with pytest.raises(ValueError):
        log_negativity(FockDensityOperator.fock([0, 0, 0]), AB)


def test_partial_transpose_swaps_indices():
    rho = FockDensityOperator.from_entries({((0, 1), (1, 0)): 0.5}, n_max=1)
    assert partial_transpose(rho, [1]).entries == {((0, 0), (1, 1)): 0.5}


def test_closed_form_examples():
    assert log_negativity_pure_closed(2, 1) == pytest.approx(1.0, abs=1e-12)
    assert log_negativity_pure_closed(4, 0) == pytest.approx(2 * math.log2((6 + math.sqrt(6)) / 4), abs=1e-14)
    assert log_negativity_pure_closed(4, 0) == pytest.approx(2.1583, abs=1e-3)
    assert log_negativity_pure_closed(0, 0) == 0.0
    assert [round(log_negativity_pure_closed(4, k), 10) for k in range(5)] == [
        2.1577284419,
        2.0,
        1.5727659412,
        2.0,
        2.1577284419,
    ]


@pytest.mark.parametrize("S", range(0, 11))
def test_route_agreement(S):
    for k in range(S + 1):
        rho = lossless_output_state(S, k)
        closed = log_negativity_pure_closed(S, k)
        assert log_negativity(rho, AB) == pytest.approx(closed, abs=1e-10)
        assert log_negativity_trace_norm(rho, AB) == pytest.approx(closed, abs=1e-10)
        assert log_negativity(rho, AB.swapped()) == pytest.approx(closed, abs=1e-10)
        assert closed <= math.log2(S + 1) + 1e-12


@settings(max_examples=30, deadline=None)
@given(weights=st.lists(st.floats(0.01, 1.0), min_size=2, max_size=6))
def test_classical_mixture_is_separable(weights):
    w = np.array(weights) / sum(weights)
    entries = {((n, 3 - n % 4), (n, 3 - n % 4)): float(p) for n, p in enumerate(w)}
    rho = FockDensityOperator.from_entries(entries, n_max=6)
    assert log_negativity(rho, AB) == pytest.approx(0.0, abs=1e-10)


@settings(max_examples=30, deadline=None)
@given(phase=st.floats(0, 2 * math.pi), theta=st.floats(0.05, 1.5))
def test_two_forms_agree_on_mixed_states(phase, theta):
    psi = {(0, 1): math.cos(theta), (1, 0): math.sin(theta) * complex(math.cos(phase), math.sin(phase))}
    pure = FockDensityOperator.from_ket(psi, n_max=1)
    noise = FockDensityOperator.from_entries({((0, 0), (0, 0)): 1.0}, n_max=1)
    kets = np.concatenate([pure.kets, noise.kets])
    bras = np.concatenate([pure.bras, noise.bras])
    vals = np.concatenate([0.7 * pure.values, 0.3 * noise.values])
    rho = FockDensityOperator(kets, bras, vals, 1, 2)
    assert log_negativity(rho, AB) == pytest.approx(log_negativity_trace_norm(rho, AB), abs=1e-12)


def test_qfi_examples():
    assert qfi_pure(4, 2) == pytest.approx(12.0, abs=1e-12)
    assert qfi_pure(4, 0) == pytest.approx(4.0, abs=1e-12)
    assert qfi_pure(0, 0) == 0.0
    # Holland-Burnett: 2N(N+1) with N = S/2
    for S in (2, 6, 10, 20):
        N = S // 2
        assert qfi_pure(S, N) == pytest.approx(2 * N * (N + 1), rel=1e-12)


@settings(max_examples=40, deadline=None)
@given(S=st.integers(0, 40), data=st.data())
def test_qfi_mode_swap(S, data):
    k = data.draw(st.integers(0, S))
    assert qfi_pure(S, k) == pytest.approx(qfi_pure(S, S - k), rel=1e-12, abs=1e-12)


def test_references():
    assert en_reference(4) == pytest.approx((2.3219, 1.0), abs=1e-4)
    assert en_reference(1) == (1.0, 1.0)
    assert en_reference(10)[0] == pytest.approx(3.4594, abs=1e-4)
    assert en_max_alternative(4) > en_reference(4)[0]
    with pytest.raises(ValueError):
        en_reference(-1)


@pytest.mark.parametrize("bad", [(-1, 0), (2, 3)])
def test_closed_form_domain(bad):
    with pytest.raises(ValueError):
        log_negativity_pure_closed(*bad)
    with pytest.raises(ValueError):
        qfi_pure(*bad)
