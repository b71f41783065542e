# CDD Chain Simulator - Observable tests
# Copyright (C) 2025-2026 CDD Chain contributors
#
# SPDX-License-Identifier: GPL-3.0-or-later
# See LICENSE file for full license text.

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from CDD_Chain.errors import ConstraintViolation, NumericalFailure
from CDD_Chain.hilbert_core import TwoSpinDensity, basis_state, partial_trace_pair
from CDD_Chain.observables import (
    ObservableSeries,
    concurrence,
    purity,
    rescaled_concurrence,
    site_fidelity,
    transfer_fidelity,
)

from conftest import random_state, random_unitary, werner_density

BELL = np.array([1, 0, 0, 1], dtype=complex) / np.sqrt(2)


def test_concurrence_of_bell_and_product_states():
    assert concurrence(np.outer(BELL, BELL.conj())) == pytest.approx(1.0, abs=1e-9)
    product = basis_state("01").density()
    assert concurrence(product) == pytest.approx(0.0, abs=1e-9)
    assert concurrence(np.eye(4) / 4) == 0.0


@pytest.mark.parametrize("p", [0.0, 0.2, 1 / 3, 0.5, 0.8, 1.0])
def test_werner_concurrence(p):
    expected = max(0.0, (3 * p - 1) / 2)
    assert concurrence(TwoSpinDensity(werner_density(p))) == pytest.approx(expected, abs=1e-9)


def test_werner_half_mixture():
    assert concurrence(werner_density(0.5)) == pytest.approx(0.25, abs=1e-9)


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(min_value=0, max_value=2**32 - 1))
def test_concurrence_is_invariant_under_local_unitaries(seed):
    rng = np.random.default_rng(seed)
    rho = partial_trace_pair(random_state(3, seed=seed), 1, 3).entries
    local = np.kron(random_unitary(2, rng), random_unitary(2, rng))
    rotated = local @ rho @ local.conj().T
    assert concurrence(rotated) == pytest.approx(concurrence(rho), abs=1e-9)


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(min_value=0, max_value=2**32 - 1))
def test_concurrence_is_bounded(seed):
    rho = partial_trace_pair(random_state(4, seed=seed), 2, 4)
    assert 0.0 <= concurrence(rho) <= 1.0


def test_concurrence_of_pure_two_spin_state():
    # C = 2|ad - bc| for a|00> + b|01> + c|10> + d|11>
    psi = random_state(2, seed=4)
    expected = 2 * abs(psi[0] * psi[3] - psi[1] * psi[2])
    assert concurrence(np.outer(psi, psi.conj())) == pytest.approx(expected, abs=1e-9)


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(min_value=0, max_value=2**32 - 1))
def test_pure_state_concurrence_matches_closed_form(seed):
    psi = random_state(2, seed=seed)
    rng = np.random.default_rng(seed)
    local = np.kron(random_unitary(2, rng), random_unitary(2, rng))
    expected = 2 * abs(psi[0] * psi[3] - psi[1] * psi[2])
    for state in (psi, local @ psi):
        assert concurrence(np.outer(state, state.conj())) == pytest.approx(expected, abs=1e-9)


def test_concurrence_rejects_negative_density():
    with pytest.raises(NumericalFailure):
        concurrence(np.diag([1.1, -0.1, 0, 0]))
    with pytest.raises(ConstraintViolation):
        concurrence(np.eye(2) / 2)


def test_concurrence_clips_small_negativity():
    rho = np.diag([0.5 + 1e-10, 0.5, 0.0, -1e-10])
    assert concurrence(rho) == pytest.approx(0.0, abs=1e-9)


def test_purity():
    assert purity(np.eye(4) / 4) == pytest.approx(0.25)
    assert purity(TwoSpinDensity(werner_density(1.0))) == pytest.approx(1.0)
    assert purity(random_state(2, seed=1)) == 1.0


def test_rescaled_concurrence():
    assert rescaled_concurrence(0.65, 24) == pytest.approx(14.95)
    assert rescaled_concurrence(0.0, 24) == 0.0


def test_transfer_fidelity_for_vectors_and_densities():
    psi = basis_state("0001")
    assert transfer_fidelity(psi, psi) == pytest.approx(1.0)
    assert transfer_fidelity(basis_state("1000"), psi) == 0.0
    mixed = 0.3 * basis_state("0001").density() + 0.7 * basis_state("1000").density()
    assert transfer_fidelity(mixed, psi) == pytest.approx(0.3)
    with pytest.raises(ConstraintViolation):
        transfer_fidelity(basis_state("01"), psi)


def test_site_fidelity():
    psi = basis_state("0110")
    assert site_fidelity(psi, 1, 0, 4) == pytest.approx(1.0)
    assert site_fidelity(psi, 2, 0, 4) == pytest.approx(0.0)
    plus = np.full(4, 0.5, dtype=complex)
    assert site_fidelity(plus, 2, 1, 2) == pytest.approx(0.5)
    assert site_fidelity(np.outer(plus, plus.conj()), 2, 1, 2) == pytest.approx(0.5)
    with pytest.raises(ConstraintViolation):
        site_fidelity(psi, 1, 2, 4)


def test_observable_series_bounds_and_peak():
    series = ObservableSeries([0.0, 0.5, 1.0], [0.1, 0.9, 0.4], "C(1,2)")
    assert series.peak() == (0.5, 0.9)
    with pytest.raises(NumericalFailure):
        ObservableSeries([0.0, 1.0], [0.5, 1.2], "C(1,2)")
    with pytest.raises(NumericalFailure):
        ObservableSeries([0.0, 1.0], [0.5, np.nan], "C(1,2)")
    with pytest.raises(ConstraintViolation):
        ObservableSeries([0.0, 1.0], [0.5], "C(1,2)")
    unbounded = ObservableSeries([0.0, 1.0], [0.5, 14.95], "rescaled", bounded=False)
    assert unbounded.peak() == (1.0, 14.95)
