# CDD Chain Simulator - Propagator tests
# Copyright (C) 2025-2026 CDD Chain contributors
#
# SPDX-License-Identifier: GPL-3.0-or-later
# See LICENSE file for full license text.

import math

import numpy as np
import pytest

from CDD_Chain.chain_models import (
    ControlFieldSpec,
    CouplingSet,
    FieldTerm,
    bath_operators,
    chain_hamiltonian,
    control_terms,
    control_unitary,
)
from CDD_Chain.errors import ConstraintViolation, NumericalFailure
from CDD_Chain.hilbert_core import PAULI, basis_state
from CDD_Chain.noise_lab import OUParams, ou_trajectory
from CDD_Chain.propagator import (
    EvolutionPlan,
    StateTrajectory,
    default_step,
    ensemble_density,
    evolve_effective_lab_frame,
    evolve_static,
    evolve_time_dependent,
    run_realizations,
)

from conftest import random_state

PLUS = np.array([1, 1], dtype=complex) / math.sqrt(2)


def test_default_step():
    spec = ControlFieldSpec(1, 2, 0.01)
    assert default_step(spec, 4) == pytest.approx(0.01 / 703)
    assert default_step(ControlFieldSpec(1, 2, 0.01), 1) == pytest.approx(0.01 / 176)
    assert default_step(ControlFieldSpec(1, 2, 1.0), 1) == pytest.approx(1.0 / 176)
    assert default_step(None) == 1e-3
    steps = spec.t_c / default_step(spec, 4)
    assert abs(steps - round(steps)) < 1e-9


def test_rabi_oscillation_matches_spectral_solution():
    step = (math.pi / 2) / 1000
    times = [0.0, math.pi / 4, math.pi / 2]
    plan = EvolutionPlan(1, PAULI["x"], times, step)
    rk4 = evolve_time_dependent(plan, basis_state("0"))
    exact = evolve_static(PAULI["x"], basis_state("0"), plan.times)
    assert np.max(np.abs(rk4.states - exact.states)) < 1e-9
    assert abs(rk4.states[-1, 1]) ** 2 == pytest.approx(1.0, abs=1e-9)


def test_time_dependent_phase():
    terms = [FieldTerm(PAULI["z"], math.cos, "cos sz")]
    plan = EvolutionPlan(1, np.zeros((2, 2)), [0.0, 1.0, 2.0], 1e-3, terms)
    traj = evolve_time_dependent(plan, PLUS)
    for t, psi in zip(traj.times, traj.states):
        expected = np.array([np.exp(-1j * math.sin(t)), np.exp(1j * math.sin(t))]) / math.sqrt(2)
        assert np.max(np.abs(psi - expected)) < 1e-8


def test_rk4_is_fourth_order():
    static = PAULI["x"]
    terms = [FieldTerm(PAULI["z"], lambda t: math.cos(3 * t), "drive")]

    def final_state(step):
        plan = EvolutionPlan(1, static, [0.0, 2.0], step, terms)
        return evolve_time_dependent(plan, PLUS).states[-1]

    reference = final_state(0.05 / 16)
    coarse = np.linalg.norm(final_state(0.05) - reference)
    fine = np.linalg.norm(final_state(0.025) - reference)
    assert 10.0 < coarse / fine < 22.0


def test_one_control_period_returns_to_initial_state():
    spec = ControlFieldSpec(1, 2, 0.01)
    N = 2
    step = default_step(spec, N)
    k = 137
    plan = EvolutionPlan(N, np.zeros((4, 4)), [k * step, spec.t_c], step, control_terms(spec, N), t_c=spec.t_c)
    psi0 = random_state(N, seed=2)
    traj = evolve_time_dependent(plan, psi0)
    assert np.max(np.abs(traj.states[0] - control_unitary(spec, N, k * step) @ psi0)) < 1e-4
    assert np.max(np.abs(traj.states[1] - psi0)) < 1e-4


def test_constant_noise_acts_as_static_field():
    N = 2
    H0 = chain_hamiltonian(CouplingSet.uniform(2, (1.0, 0.5, 0.0)), N)
    noise = ou_trajectory(OUParams(mu=0.7, sigma=0.0), 1.1, 1e-3, seed=0)
    ops = bath_operators(N)
    plan = EvolutionPlan(N, H0, [0.5, 1.0], 1e-3, noise=noise, bath_ops=ops)
    traj = evolve_time_dependent(plan, basis_state("10"))
    exact = evolve_static(H0 + 0.7 * sum(ops), basis_state("10"), plan.times)
    assert np.max(np.abs(traj.states - exact.states)) < 1e-8


def test_drift_bound_raises():
    plan = EvolutionPlan(1, 10 * PAULI["x"], [0.0, 1.0], 0.1, max_step_drift=1e-12)
    with pytest.raises(NumericalFailure):
        evolve_time_dependent(plan, basis_state("0"))


def test_plan_validation():
    spec = ControlFieldSpec(1, 2, 0.01)
    with pytest.raises(ConstraintViolation):
        EvolutionPlan(1, np.zeros((2, 2)), [0.0, 1.0], spec.t_c / 40, t_c=spec.t_c)
    with pytest.raises(ConstraintViolation):
        EvolutionPlan(1, np.zeros((2, 2)), [0.0, 1.0], -1e-3)
    with pytest.raises(ConstraintViolation):
        EvolutionPlan(1, np.zeros((2, 2)), [1.0, 0.5], 1e-3)
    with pytest.raises(ConstraintViolation):
        EvolutionPlan(1, np.zeros((2, 2)), [0.0, 1e-5], 1e-3)
    with pytest.raises(ConstraintViolation):
        EvolutionPlan(2, np.zeros((2, 2)), [0.0, 1.0], 1e-3)
    short = ou_trajectory(OUParams(), 0.5, 1e-3, seed=0)
    with pytest.raises(ConstraintViolation):
        EvolutionPlan(1, np.zeros((2, 2)), [0.0, 1.0], 1e-3, noise=short, bath_ops=bath_operators(1))
    with pytest.raises(ConstraintViolation):
        EvolutionPlan(1, np.zeros((2, 2)), [0.0, 0.4], 1e-3, noise=short)


def test_output_times_snap_to_the_step_grid():
    plan = EvolutionPlan(1, np.zeros((2, 2)), [0.00104, 0.0021], 1e-4)
    assert np.allclose(plan.times, [0.001, 0.0021])
    assert list(plan.grid_indices) == [10, 21]


def test_evolve_static_rejects_non_hermitian():
    with pytest.raises(ConstraintViolation):
        evolve_static(np.array([[0, 1], [0, 0]], dtype=complex), basis_state("0"), [0.0, 1.0])


def test_effective_lab_frame_equals_toggling_frame_at_whole_periods():
    spec = ControlFieldSpec(1, 2, 0.01)
    hbar = chain_hamiltonian(CouplingSet.uniform(3, (0.5, 1.0, 0.25)), 3)
    times = np.arange(0, 5) * spec.t_c
    lab = evolve_effective_lab_frame(hbar, spec, basis_state("100"), times)
    toggling = evolve_static(hbar, basis_state("100"), times)
    assert np.max(np.abs(lab.states - toggling.states)) < 1e-9
    assert lab.label == "effective"


def test_ensemble_density_weights_and_reduction():
    times = [0.0, 1.0]
    a = StateTrajectory(times, 2, states=np.tile(basis_state("00").amplitudes, (2, 1)))
    b = StateTrajectory(times, 2, states=np.tile(basis_state("11").amplitudes, (2, 1)))
    full = ensemble_density([a, b], weights=[0.25, 0.75])
    assert np.allclose(np.diag(full.densities[1]).real, [0.25, 0, 0, 0.75])
    single = ensemble_density([a, b], sites=[2])
    assert np.allclose(single.densities[0], np.diag([0.5, 0.5]))
    assert single.sites == (2,)


def test_ensemble_density_validation():
    a = StateTrajectory([0.0, 1.0], 1, states=np.tile([1.0, 0.0], (2, 1)).astype(complex))
    b = StateTrajectory([0.0, 2.0], 1, states=np.tile([1.0, 0.0], (2, 1)).astype(complex))
    with pytest.raises(ConstraintViolation):
        ensemble_density([a, b])
    with pytest.raises(ConstraintViolation):
        ensemble_density([a, a], weights=[0.7, 0.7])
    with pytest.raises(ConstraintViolation):
        ensemble_density([])


def test_trajectory_norm_check():
    with pytest.raises(NumericalFailure):
        StateTrajectory([0.0], 1, states=np.array([[1.0, 1.0]], dtype=complex))


def test_run_realizations_order_is_independent_of_jobs():
    def task(r):
        noise = ou_trajectory(OUParams(), 0.2, 1e-3, seed=5, realization=r)
        plan = EvolutionPlan(2, np.zeros((4, 4)), [0.0, 0.1, 0.2], 1e-3, noise=noise, bath_ops=bath_operators(2))
        return evolve_time_dependent(plan, basis_state("10"))

    serial = run_realizations(task, 4, jobs=1)
    parallel = run_realizations(task, 4, jobs=3)
    for s, p in zip(serial, parallel):
        assert np.array_equal(s.states, p.states)
    assert not np.array_equal(serial[0].states, serial[1].states)


def test_evolve_static_conserves_energy():
    H = chain_hamiltonian(CouplingSet.uniform(4, (0.5, 1.0, 0.25)), 4)
    traj = evolve_static(H, random_state(4, seed=8), np.linspace(0.0, 10.0, 51))
    energies = np.array([np.vdot(psi, H @ psi).real for psi in traj.states])
    assert np.max(np.abs(energies - energies[0])) <= 1e-10


@pytest.mark.slow
def test_noisy_ensemble_density_is_a_density():
    N = 4
    spec = ControlFieldSpec(1, 2, 0.01, variant="rotated")
    step = default_step(spec, N)
    H0 = chain_hamiltonian(CouplingSet.state_transfer(N), N)
    times = [0.0, 0.05, 0.1]
    params = OUParams(0.0, 2.0, 0.5)

    def task(r):
        noise = ou_trajectory(params, times[-1] + step, step, seed=2024, realization=r)
        plan = EvolutionPlan(N, H0, times, step, control_terms(spec, N), noise, bath_operators(N), spec.t_c)
        return evolve_time_dependent(plan, basis_state("1000"))

    ensemble = ensemble_density(run_realizations(task, 20, jobs=4))
    for rho in ensemble.densities:
        assert np.max(np.abs(rho - rho.conj().T)) <= 1e-12
        assert np.trace(rho).real == pytest.approx(1.0, abs=1e-10)
        assert np.linalg.eigvalsh(rho).min() >= -1e-10
