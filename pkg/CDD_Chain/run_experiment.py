# CDD Chain Simulator - Experiment runner
# Copyright (C) 2025-2026 CDD Chain contributors
#
# SPDX-License-Identifier: GPL-3.0-or-later
# See LICENSE file for full license text.

"""
Runs one experiment config and collects its curves into result tables.

Steps per curve set (one per sweep value):
1. Build couplings, control spec and the effective Hamiltonian.
2. "exact": noisy time-dependent evolution with the control (and drive/gate) fields,
   averaged over the noise realizations.
3. "uncontrolled": the baseline Hamiltonian (chain, effective or chain + static gate
   field) with the same noise and no control fields.
4. "effective": U_c(t) e^{-i Hbar t} psi0, noise free.
5. "jw": the Jordan-Wigner fast path when the couplings satisfy 2 l1 + l2 + l3 = 0 and
   the chain starts in |11...1>; checked against the dense effective curve.
6. Per-column metrics (peak, time of peak, deviation from the effective curve) and the
   run metadata (seeds, drift, wall times, build).
"""

# Built-in modules
import logging
import time
from dataclasses import dataclass, field
from typing import Optional

# External modules
import numpy as np
import pandas as pd

# Local imports
from . import __version__
from .chain_models import (
    bath_operators,
    chain_hamiltonian,
    control_terms,
    drive_terms,
    gate_field_hamiltonian,
    gate_terms,
    validate_gate_integers,
)
from .effective_hamiltonian import (
    EffectiveVariant,
    effective_hamiltonian_for,
    select_chain_variant,
    verify_decoupling,
)
from .errors import ConstraintViolation, NumericalFailure
from .experiment_config import ExperimentConfig, serialize_config
from .hilbert_core import basis_state, check_exact_size, reduced_density
from .jw_fastpath import JW_VARIANTS, jw_pair_series
from .noise_lab import ou_trajectory, realization_seed_label
from .observables import (
    ObservableSeries,
    concurrence,
    purity,
    site_fidelity,
    transfer_fidelity,
)
from .propagator import (
    EvolutionPlan,
    default_step,
    ensemble_density,
    evolve_effective_lab_frame,
    evolve_time_dependent,
    run_realizations,
)
from .utils import DEFAULT_SETTINGS, git_describe

JW_AGREEMENT_TOL = 1e-6
DECOUPLING_CHECK_MAX_SITES = 6
TAU_RATIO_WARNING = 0.1


@dataclass
class ResultTable:
    """One curve set: a frame with column "t" plus one column per curve and observable."""

    name: str
    frame: pd.DataFrame
    metrics: dict = field(default_factory=dict)
    sweep: Optional[tuple] = None

    @property
    def curve_columns(self) -> list:
        return [c for c in self.frame.columns if c != "t"]


@dataclass
class RunResult:
    config: ExperimentConfig
    tables: list
    metadata: dict
    noise: list = field(default_factory=list)


def observable_label(obs: dict) -> str:
    if obs["kind"] == "concurrence":
        return "C({},{})".format(*obs["pair"])
    if obs["kind"] == "purity":
        return "P({},{})".format(*obs["pair"])
    if obs["kind"] == "fidelity":
        return f"F({obs['target']})"
    return f"F_site({obs['site']},{obs['bit']})"


def observe(cfg: ExperimentConfig, trajectories: list, curve: str) -> dict:
    """
    Observable series of an ensemble of state trajectories.

    Fidelities are linear in rho, so their ensemble value is the realization mean.
    Concurrence and purity use the ensemble-averaged pair density, or the mean of the
    per-realization concurrences in "mean_of_realizations" mode.
    """
    N = trajectories[0].n_sites
    times = trajectories[0].times
    series = {}
    for obs in cfg.observables:
        label = observable_label(obs)
        kind = obs["kind"]
        if kind == "fidelity":
            target = basis_state(obs["target"])
            values = np.mean(
                [[transfer_fidelity(psi, target) for psi in tr.states] for tr in trajectories], axis=0
            )
        elif kind == "site_fidelity":
            values = np.mean(
                [[site_fidelity(psi, obs["site"], obs["bit"], N) for psi in tr.states] for tr in trajectories],
                axis=0,
            )
        elif kind == "concurrence" and cfg.concurrence_mode == "mean_of_realizations":
            values = np.mean(
                [[concurrence(reduced_density(psi, obs["pair"], N)) for psi in tr.states] for tr in trajectories],
                axis=0,
            )
        else:
            densities = ensemble_density(trajectories, sites=obs["pair"]).densities
            measure = concurrence if kind == "concurrence" else purity
            values = np.array([measure(rho) for rho in densities])
        series[f"{curve} {label}"] = ObservableSeries(times, values, f"{curve} {label}")
    return series


def _jw_variant(cfg: ExperimentConfig, spec, variant) -> Optional[str]:
    """The hbar1/hbar2 tag when the fast path applies, otherwise None."""
    c = cfg.coupling_set()
    tag = EffectiveVariant(variant) if variant is not None else select_chain_variant(spec)
    eligible = (
        tag is not None
        and tag.value in JW_VARIANTS
        and c.drives is None
        and spec.variant != "gate"
        and c.satisfies_free_fermion_constraint()
        and set(cfg.initial_state) == {"1"}
        and any(obs["kind"] in ("concurrence", "purity") for obs in cfg.observables)
    )
    return tag.value if eligible else None


def _select_curves(cfg: ExperimentConfig, jw_variant: Optional[str], max_sites: int) -> list:
    if cfg.curves is None:
        curves = ["exact", "uncontrolled", "effective"] if cfg.n_sites <= max_sites else []
        if jw_variant is not None:
            curves.append("jw")
        if not curves:
            raise ConstraintViolation(
                f"N={cfg.n_sites} exceeds the dense limit of {max_sites} sites and the "
                "Jordan-Wigner path does not apply"
            )
        return curves
    if "jw" in cfg.curves and jw_variant is None:
        logging.error("Jordan-Wigner curve requested for an ineligible parameter set")
        raise ConstraintViolation(
            "The Jordan-Wigner path needs 2*lambda_1 + lambda_2 + lambda_3 = 0 on uniform bonds, "
            "lambda_1 != 0, no drive, a hbar1/hbar2 variant and the initial state |11...1>"
        )
    return list(cfg.curves)


def _output_times(cfg: ExperimentConfig, spec, step: float) -> np.ndarray:
    grid = spec.t_c if cfg.integrator["stroboscopic"] else step
    return np.unique(np.rint(cfg.times() / grid) * grid)


def _metrics(columns: dict) -> dict:
    metrics = {}
    for name, s in columns.items():
        t_peak, peak = s.peak()
        entry = {"peak": peak, "t_peak": t_peak}
        curve, label = name.split(" ", 1)
        reference = columns.get(f"effective {label}")
        if reference is not None and curve != "effective":
            entry["max_dev_from_effective"] = float(np.max(np.abs(s.values - reference.values)))
        metrics[name] = entry
    return metrics


def run_curve_set(cfg: ExperimentConfig, sweep_key=None, sweep_value=None, jobs: int = 1,
                  max_sites: int = DEFAULT_SETTINGS["max_exact_sites"]) -> tuple:
    """
    Compute every curve of one curve set.

    Returns:
        tuple[ResultTable, dict, Optional[NoiseTrajectory]]: the table, its metadata and the
        first noise realization (None when no noisy curve ran).
    """
    N = cfg.n_sites
    couplings = cfg.coupling_set()
    spec = cfg.control_spec()
    variant = cfg.effective_variant
    if sweep_key == "effective_variant":
        variant = sweep_value
    elif sweep_key is not None:
        spec = spec.with_values(**{sweep_key: float(sweep_value)})
    name = cfg.name if sweep_key is None else f"{cfg.name}_{sweep_key}={sweep_value}"
    logging.info(f"Curve set [{name}]: N={N}, {spec}")

    warnings = spec.validity_warnings(N)
    if spec.t_c > TAU_RATIO_WARNING * cfg.noise["tau"]:
        warnings.append(f"t_c={spec.t_c} is not small against tau={cfg.noise['tau']}")
    if spec.variant == "gate":
        _, violated = validate_gate_integers(spec.n_x1, spec.n_y1, spec.n_x, spec.n_y)
        warnings += [f"gate condition violated: {v}" for v in violated]
    for warning in warnings:
        logging.warning(f"[{name}] {warning}")

    jw_variant = _jw_variant(cfg, spec, variant)
    curves = _select_curves(cfg, jw_variant, max_sites)
    dense = [c for c in curves if c != "jw"]
    if dense:
        check_exact_size(N, max_sites)

    step = cfg.integrator["step"] or default_step(spec, N)
    times = _output_times(cfg, spec, step)
    meta = {
        "name": name,
        "sweep": None if sweep_key is None else {sweep_key: sweep_value},
        "curves": curves,
        "step": step,
        "warnings": warnings,
        "drift": {},
        "wall_time_s": {},
    }
    columns = {}
    noise_sample = None

    hbar = None
    if "effective" in dense or ("uncontrolled" in dense and cfg.baseline == "effective"):
        hbar, route = effective_hamiltonian_for(spec, couplings, N, variant)
        meta["effective_route"] = route
    if dense and spec.is_integer and N <= DECOUPLING_CHECK_MAX_SITES:
        meta["decoupling_residuals"] = verify_decoupling(spec, N)

    psi0 = basis_state(cfg.initial_state)
    params = cfg.ou_params()
    noise_cfg = cfg.noise
    realizations = noise_cfg["realizations"] if params.sigma > 0 else 1
    if params.sigma == 0 and noise_cfg["realizations"] > 1:
        logging.info("sigma = 0: a single noise-free realization replaces the ensemble")
    duration = float(times[-1]) + step
    bath_ops = bath_operators(N, noise_cfg["literal_bath_sum"]) if dense else None
    h0 = chain_hamiltonian(couplings, N) if dense else None

    def noisy_curve(curve: str, static, terms, t_c):
        def task(r: int):
            noise = ou_trajectory(params, duration, step, noise_cfg["seed"], r,
                                  noise_cfg["start_at_mean"], noise_cfg["scheme"])
            plan = EvolutionPlan(N, static, times, step, terms, noise, bath_ops, t_c,
                                 cfg.integrator["max_step_drift"])
            return evolve_time_dependent(plan, psi0)

        started = time.perf_counter()
        trajectories = run_realizations(task, realizations, jobs)
        columns.update(observe(cfg, trajectories, curve))
        meta["drift"][curve] = {
            "max_step": max(t.max_step_drift for t in trajectories),
            "cumulative": max(t.cumulative_drift for t in trajectories),
        }
        meta["wall_time_s"][curve] = time.perf_counter() - started
        logging.info(f"[{name}] {curve} curve done ({realizations} realizations)")

    if "exact" in dense:
        terms = control_terms(spec, N)
        if couplings.drives is not None:
            terms += drive_terms(couplings, spec, N)
        if spec.variant == "gate" and couplings.t_g is not None:
            terms += gate_terms(spec, couplings.t_g, N)
        noisy_curve("exact", h0, terms, spec.t_c)

    if "uncontrolled" in dense:
        if cfg.baseline == "effective":
            static = hbar
        elif cfg.baseline == "gate_field":
            static = h0 + gate_field_hamiltonian(couplings.t_g, N)
        else:
            static = h0
        noisy_curve("uncontrolled", static, (), None)

    if dense:
        noise_sample = ou_trajectory(params, duration, step, noise_cfg["seed"], 0,
                                     noise_cfg["start_at_mean"], noise_cfg["scheme"])

    if "effective" in dense:
        started = time.perf_counter()
        trajectory = evolve_effective_lab_frame(hbar, spec, psi0, times)
        columns.update(observe(cfg, [trajectory], "effective"))
        meta["wall_time_s"]["effective"] = time.perf_counter() - started

    if "jw" in curves:
        started = time.perf_counter()
        lambda1, lambda2, _ = couplings.lambdas[0]
        for obs in cfg.observables:
            if obs["kind"] not in ("concurrence", "purity"):
                continue
            pair = tuple(obs["pair"])
            label = observable_label(obs)
            key = f"jw {label}"
            if key in columns:
                continue
            series = jw_pair_series(lambda1, lambda2, N, jw_variant, pair, times)
            if obs["kind"] == "concurrence":
                columns[key] = series["concurrence"]
                columns["jw C_R{}".format(label[1:])] = series["rescaled_concurrence"]
            else:
                columns[key] = series["purity"]
            reference = columns.get(f"effective {label}")
            if reference is not None:
                deviation = float(np.max(np.abs(columns[key].values - reference.values)))
                meta.setdefault("jw_agreement", {})[label] = deviation
                if deviation > JW_AGREEMENT_TOL:
                    logging.error(f"[{name}] JW and dense {label} differ by {deviation:.3e}")
                    raise NumericalFailure(
                        f"Jordan-Wigner and dense {label} differ by {deviation:.3e} (> {JW_AGREEMENT_TOL})"
                    )
        meta["wall_time_s"]["jw"] = time.perf_counter() - started

    frame = pd.DataFrame({"t": times, **{k: s.values for k, s in columns.items()}})
    table = ResultTable(name, frame, _metrics(columns), None if sweep_key is None else (sweep_key, sweep_value))
    meta["metrics"] = table.metrics
    return table, meta, noise_sample


def run_preset(cfg: ExperimentConfig, jobs: int = 1, settings: dict = None) -> RunResult:
    """
    Run every curve set of an experiment.

    Parameters:
        cfg (ExperimentConfig): validated config.
        jobs (int): realization parallelism.
        settings (dict | None): runtime settings ("max_exact_sites").

    Returns:
        RunResult: tables in sweep order plus the run metadata.

    Raises:
        ConstraintViolation: infeasible N or a violated model precondition.
        NumericalFailure: drift, solver or cross-check failure.
    """
    settings = settings or DEFAULT_SETTINGS
    max_sites = int(settings.get("max_exact_sites", DEFAULT_SETTINGS["max_exact_sites"]))
    started = time.perf_counter()
    tables, table_meta, noise = [], [], []
    for key, value in cfg.sweep_values():
        table, meta, noise_sample = run_curve_set(cfg, key, value, jobs, max_sites)
        tables.append(table)
        table_meta.append(meta)
        if noise_sample is not None:
            noise.append((table.name, noise_sample))

    seed = cfg.noise["seed"]
    metadata = {
        "package_version": __version__,
        "config": serialize_config(cfg),
        "seed": {
            "base": seed,
            "realizations": cfg.noise["realizations"],
            "derivation": [realization_seed_label(seed, r) for r in range(cfg.noise["realizations"])],
        },
        "jobs": jobs,
        "tables": table_meta,
        "wall_time_s": time.perf_counter() - started,
        "git_describe": git_describe(),
    }
    return RunResult(cfg, tables, metadata, noise)
