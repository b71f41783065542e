# CDD Chain Simulator - End-to-end preset checks
# Copyright (C) 2025-2026 CDD Chain contributors
#
# SPDX-License-Identifier: GPL-3.0-or-later
# See LICENSE file for full license text.

"""
Preset-level checks of the physics: state transfer, agreement with the effective
dynamics, breakdown for slow control fields, the gate suite and the free-fermion chain.

Noisy N=4 runs take minutes and carry the `slow` marker (`pytest -m slow`).
"""

import numpy as np
import pytest

from CDD_Chain.chain_models import CouplingSet, validate_gate_integers
from CDD_Chain.effective_hamiltonian import effective_chain
from CDD_Chain.experiment_config import parse_config, with_overrides
from CDD_Chain.hilbert_core import basis_state, partial_trace_pair
from CDD_Chain.jw_fastpath import jw_concurrence_curve
from CDD_Chain.observables import transfer_fidelity
from CDD_Chain.propagator import evolve_static
from CDD_Chain.run_experiment import run_preset

NOISE_FREE = {"sigma": 0.0, "realizations": 1}

# 0.75|00> + (-0.55 + 0.37i)|11> on spins (1, 4) at the hbar2 peak
PEAK_STATE = np.array([0.75, 0.0, 0.0, -0.55 + 0.37j])
PEAK_STATE = PEAK_STATE / np.linalg.norm(PEAK_STATE)


def preset(name: str, **changes):
    cfg = parse_config({"preset": name})
    return with_overrides(cfg, **changes) if changes else cfg


def test_free_fermion_four_site_chain():
    times = preset("jw-special").times()
    hbar2 = jw_concurrence_curve(2.0, 1.0, 4, "hbar2", (1, 4), times)
    hbar1 = jw_concurrence_curve(2.0, 1.0, 4, "hbar1", (1, 4), times)
    t_peak, peak = hbar2.peak()
    assert peak >= 0.99
    assert abs(t_peak - 3.885) <= 0.05
    assert np.max(hbar1.values) <= 0.01

    couplings = CouplingSet.uniform(4, (2.0, 1.0, -5.0))
    (psi,) = evolve_static(effective_chain(couplings, 4, "hbar2"), basis_state("1111"), [t_peak]).states
    rho = partial_trace_pair(psi, 1, 4, 4)
    assert transfer_fidelity(rho.entries, PEAK_STATE) >= 0.99
    assert transfer_fidelity(rho.entries, PEAK_STATE.conj()) < 0.9


def test_four_site_peak_lies_beyond_the_first_three_time_units():
    early = jw_concurrence_curve(2.0, 1.0, 4, "hbar2", (1, 4), np.linspace(0.0, 3.0, 301))
    assert early.peak()[1] < 0.9


def test_twelve_site_chain_end_to_end_entanglement():
    times = np.linspace(0.0, 8.0, 161)
    assert np.max(jw_concurrence_curve(2.0, 1.0, 12, "hbar2", (1, 12), times).values) >= 0.7
    assert np.max(jw_concurrence_curve(2.0, 1.0, 12, "hbar1", (1, 12), times).values) <= 0.01


def test_noise_free_state_transfer():
    cfg = preset(
        "state-transfer-ising",
        noise={"sigma": 0.0, "realizations": 1},
        curves=["effective"],
    )
    table = run_preset(cfg).tables[0]
    t_peak, peak = table.metrics["effective F(0001)"]["t_peak"], table.metrics["effective F(0001)"]["peak"]
    assert peak >= 0.999
    assert abs(t_peak - np.pi / 2) <= 0.02


def test_gate_integers():
    ok, violated = validate_gate_integers(4, 8, 1, 2)
    assert ok and not violated


@pytest.mark.slow
def test_state_transfer_under_noise():
    cfg = preset("state-transfer-ising", time_grid={"stop": 2.0, "num": 201})
    table = run_preset(cfg, jobs=4).tables[0]
    exact = table.metrics["exact F(0001)"]
    baseline = table.metrics["uncontrolled F(0001)"]
    assert exact["peak"] >= 0.95
    assert abs(exact["t_peak"] - np.pi / 2) <= 0.2
    assert exact["peak"] - baseline["peak"] >= 0.2


@pytest.mark.slow
def test_exact_dynamics_follow_effective_dynamics():
    cfg = preset("ising-entanglement", time_grid={"stop": 2.0, "num": 201}, curves=["exact", "effective"])
    table = run_preset(cfg, jobs=4).tables[0]
    assert table.metrics["exact C(1,4)"]["max_dev_from_effective"] <= 0.05


@pytest.mark.slow
@pytest.mark.parametrize("name", ["ising-entanglement", "xy-entanglement", "xyz-entanglement"])
def test_noise_free_exact_dynamics_follow_effective_dynamics(name):
    cfg = preset(
        name,
        noise=NOISE_FREE,
        time_grid={"start": 0.0, "stop": 6.0, "num": 121},
        curves=["exact", "effective"],
    )
    for table in run_preset(cfg).tables:
        deviations = {k: m["max_dev_from_effective"] for k, m in table.metrics.items() if k.startswith("exact C(")}
        assert deviations
        assert max(deviations.values()) <= 0.02, (table.name, deviations)


def test_resonant_fields_generate_more_entanglement():
    cfg = preset("xyz-entanglement", noise=NOISE_FREE, curves=["effective"])
    hbar1, hbar2 = run_preset(cfg).tables
    assert hbar1.name.endswith("n_y=3") and hbar2.name.endswith("n_y=2")
    assert hbar2.metrics["effective C(1,4)"]["peak"] > hbar1.metrics["effective C(1,4)"]["peak"] + 0.1


@pytest.mark.slow
def test_deviation_from_hbar2_shrinks_as_n_y_approaches_resonance():
    tables = run_preset(preset("ny-sweep")).tables
    deviations = [t.metrics["exact C(1,4)"]["max_dev_from_effective"] for t in tables]
    assert [t.name.rsplit("=", 1)[1] for t in tables] == ["2.00001", "2.0001", "2.01", "2.1"]
    assert np.all(np.diff(deviations) > 0)


@pytest.mark.slow
def test_ten_site_state_transfer():
    cfg = preset("state-transfer-ising-10", noise=NOISE_FREE, curves=["effective"])
    metrics = run_preset(cfg).tables[0].metrics["effective F(0000000001)"]
    assert metrics["peak"] >= 0.999
    assert abs(metrics["t_peak"] - np.pi / 2) <= 0.02


@pytest.mark.slow
def test_slow_control_fields_break_decoupling():
    cfg = preset("tc-breakdown", sweep={"t_c": [0.5]}, curves=["exact", "effective"])
    table = run_preset(cfg, jobs=4).tables[0]
    assert table.metrics["exact C(1,4)"]["peak"] <= 0.2
    assert table.metrics["exact C(1,4)"]["max_dev_from_effective"] > 0.05


@pytest.mark.slow
def test_spin_one_protection():
    cfg = preset("spin1-protect", noise={"realizations": 5})
    table = run_preset(cfg, jobs=4).tables[0]
    protected = table.frame["exact F_site(1,0)"].to_numpy()
    unprotected = table.frame["uncontrolled F_site(1,0)"].to_numpy()
    assert protected.min() >= 0.95
    assert unprotected.min() < 0.8


@pytest.mark.slow
def test_noise_free_protected_gate():
    cfg = preset("protected-gate", noise={"sigma": 0.0, "realizations": 1}, curves=["exact", "effective"])
    table = run_preset(cfg).tables[0]
    assert table.frame["effective F_site(1,1)"].iloc[-1] >= 0.999
    assert table.frame["exact F_site(1,1)"].iloc[-1] >= 0.99


@pytest.mark.slow
def test_protected_gate_under_noise():
    cfg = preset("protected-gate", noise={"realizations": 5}, curves=["exact"])
    table = run_preset(cfg, jobs=4).tables[0]
    assert table.frame["exact F_site(1,1)"].iloc[-1] >= 0.95
