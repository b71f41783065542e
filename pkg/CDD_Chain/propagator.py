# CDD Chain Simulator - Time evolution
# Copyright (C) 2025-2026 CDD Chain contributors
#
# SPDX-License-Identifier: GPL-3.0-or-later
# See LICENSE file for full license text.

"""
Time evolution of chain states.

Functions:
- `evolve_time_dependent`: fixed-step classical Runge-Kutta (4th order) integration of
  i dpsi/dt = H(t) psi, with H(t) = static + sum_k f_k(t) O_k + B(t) . (Sx, Sy, Sz).
  The noise B is held constant over each step at the sample covering the step start.
  The state is renormalized after every step; per-step and cumulative drift are recorded.
- `evolve_static`: e^{-iHt} psi0 through the spectral decomposition of a Hermitian H.
- `evolve_effective_lab_frame`: U_c(t) e^{-i Hbar t} psi0, the effective dynamics mapped
  back to the laboratory frame.
- `ensemble_density`: weighted average of |psi_r><psi_r| (optionally reduced to a site
  subset) in realization order.
- `run_realizations`: map a per-realization function over a thread pool, keeping order.
"""

# Built-in modules
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

# External modules
import numpy as np
from scipy import linalg

# Local imports
from .chain_models import ControlFieldSpec, control_site_unitaries
from .errors import ConstraintViolation, NumericalFailure
from .hilbert_core import (
    HERMITIAN_TOL,
    SpinState,
    apply_local,
    as_amplitudes,
    is_hermitian,
    reduced_density,
)
from .noise_lab import NoiseTrajectory

STEPS_PER_PERIOD = 50
PHASE_STEP = 0.08
DEFAULT_MAX_STEP_DRIFT = 1e-5
DRIFT_WARNING = 1e-6
STATE_NORM_TOL = 1e-8
GRID_TOL = 1e-9


def default_step(spec: Optional[ControlFieldSpec], n_sites: int = 1) -> float:
    """
    h = t_c / ceil(max(50 n_max, Omega t_c / 0.08)), i.e. at most min(t_c / (50 n_max), 0.08 / Omega).

    n_max = max(2, |field integers|) and Omega = N w max_i sqrt(n_x^2 + n_y^2) bounds the
    spectrum of the collective control field, so h Omega stays in the accurate range of RK4.
    """
    if spec is None:
        return 1e-3
    n_max = max(2.0, spec.max_integer)
    per_site = max(math.hypot(n_x, n_y) for n_x, n_y in spec.site_integers(n_sites))
    spectral_radius = max(n_sites, 1) * spec.omega * per_site
    # whole number of steps per control period
    steps = math.ceil(max(STEPS_PER_PERIOD * n_max, spectral_radius * spec.t_c / PHASE_STEP))
    return spec.t_c / steps


@dataclass(frozen=True)
class EvolutionPlan:
    """
    Everything `evolve_time_dependent` needs.

    static:     time-independent part (chain Hamiltonian, static gate field, ...).
    terms:      time-dependent FieldTerm list (control, drive, gate fields).
    noise:      optional OU trajectory; multiplies `bath_ops` = (Sx, Sy, Sz).
    times:      requested output times, snapped to multiples of `step`.
    t_c:        control period when control fields are present; enforces step <= t_c / 50.
    """

    n_sites: int
    static: np.ndarray
    times: np.ndarray
    step: float
    terms: tuple = ()
    noise: Optional[NoiseTrajectory] = None
    bath_ops: Optional[tuple] = None
    t_c: Optional[float] = None
    max_step_drift: float = DEFAULT_MAX_STEP_DRIFT

    def __post_init__(self):
        dim = 2**self.n_sites
        static = np.asarray(self.static, dtype=complex)
        if static.shape != (dim, dim):
            raise ConstraintViolation(f"Static Hamiltonian must be {dim}x{dim}, got {static.shape}")
        if not (math.isfinite(self.step) and self.step > 0):
            raise ConstraintViolation(f"Integrator step must be positive, got {self.step}")
        if self.t_c is not None and self.step > self.t_c / STEPS_PER_PERIOD * (1 + GRID_TOL):
            logging.error(f"Step {self.step:.3e} exceeds t_c/{STEPS_PER_PERIOD} = {self.t_c / STEPS_PER_PERIOD:.3e}")
            raise ConstraintViolation(
                f"Integrator step {self.step:.3e} is too large for t_c={self.t_c} "
                f"(limit t_c/{STEPS_PER_PERIOD})"
            )
        times = np.asarray(self.times, dtype=float).reshape(-1)
        if times.size == 0 or times[0] < 0 or np.any(np.diff(times) <= 0):
            raise ConstraintViolation("Output times must be nonnegative and strictly increasing")
        indices = np.rint(times / self.step).astype(np.int64)
        if np.any(np.diff(indices) <= 0):
            raise ConstraintViolation("Output times are closer together than the integrator step")
        if self.noise is not None and self.bath_ops is None:
            raise ConstraintViolation("A noise trajectory needs the bath operators")
        if self.noise is not None and self.noise.times[-1] + self.noise.dt < indices[-1] * self.step - GRID_TOL:
            raise ConstraintViolation("Noise trajectory is shorter than the evolution")
        object.__setattr__(self, "static", static)
        object.__setattr__(self, "terms", tuple(self.terms))
        object.__setattr__(self, "times", indices * self.step)

    @property
    def grid_indices(self) -> np.ndarray:
        return np.rint(self.times / self.step).astype(np.int64)


@dataclass(frozen=True)
class StateTrajectory:
    """
    States (K, 2^N) or densities (K, d, d) at `times`.

    max_step_drift / cumulative_drift: norm drift of the integrator before renormalization
    (zero for the spectral routes).
    """

    times: np.ndarray
    n_sites: int
    states: Optional[np.ndarray] = None
    densities: Optional[np.ndarray] = None
    label: str = ""
    max_step_drift: float = 0.0
    cumulative_drift: float = 0.0
    sites: Optional[tuple] = field(default=None)

    def __post_init__(self):
        if (self.states is None) == (self.densities is None):
            raise ConstraintViolation("A trajectory holds either states or densities")
        times = np.asarray(self.times, dtype=float)
        data = self.states if self.states is not None else self.densities
        if data.shape[0] != times.size:
            raise ConstraintViolation("Trajectory data does not match its time grid")
        if self.states is not None:
            norms = np.linalg.norm(self.states, axis=1)
            if np.max(np.abs(norms - 1.0), initial=0.0) > STATE_NORM_TOL:
                raise NumericalFailure("Trajectory state is not normalized within 1e-8")
        object.__setattr__(self, "times", times)

    def state_at(self, k: int) -> SpinState:
        return SpinState(self.states[k], self.n_sites)


def _stack_terms(plan: EvolutionPlan):
    """Operators of all time-dependent parts as one (m, d, d) array plus a coefficient function."""
    operators = [term.operator for term in plan.terms]
    coefficient_funcs = [term.coefficient for term in plan.terms]
    if plan.noise is not None:
        operators += list(plan.bath_ops)
    if not operators:
        return None, None
    stacked = np.array(operators, dtype=complex)
    noise = plan.noise

    def coefficients(t: float, t_hold: float) -> np.ndarray:
        values = [f(t) for f in coefficient_funcs]
        if noise is not None:
            values.extend(noise.at(t_hold))
        return np.asarray(values, dtype=float)

    return stacked, coefficients


def evolve_time_dependent(plan: EvolutionPlan, psi0) -> StateTrajectory:
    """
    Integrate the Schrodinger equation with fixed-step RK4.

    Parameters:
        plan (EvolutionPlan): Hamiltonian parts, output grid and step.
        psi0 (SpinState | np.ndarray): initial state of matching dimension.

    Returns:
        StateTrajectory: states at the (snapped) output times with drift metadata.

    Raises:
        ConstraintViolation: dimension mismatch.
        NumericalFailure: per-step norm drift above plan.max_step_drift.
    """
    psi = np.array(as_amplitudes(psi0), dtype=complex)
    if psi.shape != (2**plan.n_sites,):
        raise ConstraintViolation(f"Initial state does not match {plan.n_sites} sites")
    h = plan.step
    static = plan.static
    stacked, coefficients = _stack_terms(plan)

    def hamiltonian(t: float, t_hold: float) -> np.ndarray:
        if stacked is None:
            return static
        return static + np.tensordot(coefficients(t, t_hold), stacked, axes=1)

    indices = plan.grid_indices
    states = np.empty((indices.size, psi.size), dtype=complex)
    max_drift = 0.0
    cumulative = 0.0
    output = 0
    if indices[0] == 0:
        states[0] = psi
        output = 1

    for k in range(int(indices[-1])):
        t = k * h
        h_start = hamiltonian(t, t)
        h_mid = hamiltonian(t + 0.5 * h, t)
        h_end = hamiltonian(t + h, t)
        k1 = -1j * (h_start @ psi)
        k2 = -1j * (h_mid @ (psi + 0.5 * h * k1))
        k3 = -1j * (h_mid @ (psi + 0.5 * h * k2))
        k4 = -1j * (h_end @ (psi + h * k3))
        psi = psi + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)

        norm = np.linalg.norm(psi)
        drift = abs(norm - 1.0)
        if drift > plan.max_step_drift:
            logging.error(f"Norm drift {drift:.3e} at t={t + h:.6f} exceeds {plan.max_step_drift:.1e}")
            raise NumericalFailure(
                f"Per-step norm drift {drift:.3e} at t={t + h:.6f} exceeds {plan.max_step_drift:.1e}"
            )
        max_drift = max(max_drift, drift)
        cumulative += drift
        psi = psi / norm

        while output < indices.size and indices[output] == k + 1:
            states[output] = psi
            output += 1

    if max_drift > DRIFT_WARNING:
        logging.warning(f"Integrator norm drift reached {max_drift:.3e} per step")
    logging.debug(f"RK4: {indices[-1]} steps, max drift {max_drift:.3e}, cumulative {cumulative:.3e}")
    return StateTrajectory(plan.times, plan.n_sites, states=states,
                           max_step_drift=max_drift, cumulative_drift=cumulative)


def evolve_static(H: np.ndarray, psi0, times) -> StateTrajectory:
    """
    e^{-iHt} psi0 at every requested time.

    Raises:
        ConstraintViolation: non-Hermitian H or dimension mismatch.
    """
    H = np.asarray(H, dtype=complex)
    psi = np.asarray(as_amplitudes(psi0), dtype=complex)
    if H.shape != (psi.size, psi.size):
        raise ConstraintViolation("Hamiltonian and state dimensions differ")
    scale = max(1.0, float(np.max(np.abs(H), initial=0.0)))
    if not is_hermitian(H, HERMITIAN_TOL * scale):
        logging.error("evolve_static received a non-Hermitian matrix")
        raise ConstraintViolation("evolve_static needs a Hermitian Hamiltonian")
    try:
        energies, vectors = linalg.eigh(0.5 * (H + H.conj().T))
    except linalg.LinAlgError as e:
        logging.error(f"Eigendecomposition failed: {e}")
        raise NumericalFailure(f"Eigendecomposition failed: {e}") from e
    times = np.asarray(times, dtype=float).reshape(-1)
    amplitudes = vectors.conj().T @ psi
    phases = np.exp(-1j * np.outer(times, energies))
    states = (phases * amplitudes) @ vectors.T
    n_sites = int(round(math.log2(psi.size)))
    return StateTrajectory(times, n_sites, states=states)


def evolve_effective_lab_frame(Hbar: np.ndarray, spec: ControlFieldSpec, psi0, times) -> StateTrajectory:
    """psi_eff(t) = U_c(t) e^{-i Hbar t} psi0, with U_c in closed form."""
    toggling = evolve_static(Hbar, psi0, times)
    n_sites = toggling.n_sites
    states = np.array(
        [
            apply_local(control_site_unitaries(spec, n_sites, t), psi)
            for t, psi in zip(toggling.times, toggling.states)
        ]
    )
    return StateTrajectory(toggling.times, n_sites, states=states, label="effective")


def ensemble_density(trajectories, weights=None, sites=None) -> StateTrajectory:
    """
    rho(t) = sum_r w_r |psi_r(t)><psi_r(t)|, summed in realization order.

    Parameters:
        trajectories (list[StateTrajectory]): state trajectories on identical grids.
        weights (Sequence[float] | None): nonnegative, summing to 1; equal when None.
        sites (Sequence[int] | None): reduce each state to these sites before averaging.

    Raises:
        ConstraintViolation: empty input, grid mismatch or invalid weights.
    """
    if not trajectories:
        raise ConstraintViolation("No trajectories to average")
    reference = trajectories[0]
    for trajectory in trajectories[1:]:
        if trajectory.times.shape != reference.times.shape or not np.allclose(
            trajectory.times, reference.times, atol=GRID_TOL, rtol=0.0
        ):
            logging.error("Ensemble members are on different time grids")
            raise ConstraintViolation("Ensemble members must share one time grid")
    if weights is None:
        weights = np.full(len(trajectories), 1.0 / len(trajectories))
    weights = np.asarray(weights, dtype=float)
    if weights.shape != (len(trajectories),) or np.any(weights < 0) or abs(weights.sum() - 1.0) > 1e-12:
        raise ConstraintViolation("Weights must be nonnegative, one per trajectory, summing to 1")

    n_sites = reference.n_sites
    dim = 2 ** (len(sites) if sites is not None else n_sites)
    densities = np.zeros((reference.times.size, dim, dim), dtype=complex)
    for weight, trajectory in zip(weights, trajectories):
        for k, psi in enumerate(trajectory.states):
            if sites is None:
                densities[k] += weight * np.outer(psi, psi.conj())
            else:
                densities[k] += weight * reduced_density(psi, sites, n_sites)
    return StateTrajectory(
        reference.times,
        n_sites,
        densities=densities,
        label=reference.label,
        max_step_drift=max(t.max_step_drift for t in trajectories),
        cumulative_drift=max(t.cumulative_drift for t in trajectories),
        sites=None if sites is None else tuple(sites),
    )


def run_realizations(task, realizations: int, jobs: int = 1) -> list:
    """
    Evaluate task(r) for r = 0..R-1 and return the results in realization order.

    With jobs > 1 the realizations run on a thread pool; the result order never depends on
    completion order.
    """
    if jobs <= 1:
        results = []
        for r in range(realizations):
            results.append(task(r))
            logging.info(f"Realization {r + 1}/{realizations} done")
        return results
    with ThreadPoolExecutor(max_workers=jobs) as executor:
        results = list(executor.map(task, range(realizations)))
    logging.info(f"{realizations} realizations done on {jobs} workers")
    return results
