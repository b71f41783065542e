# CDD Chain Simulator - Experiment configuration
# Copyright (C) 2025-2026 CDD Chain contributors
#
# SPDX-License-Identifier: GPL-3.0-or-later
# See LICENSE file for full license text.

"""
Experiment configuration: parsing, validation, presets and serialization.

An experiment is one JSON document. A "preset" key names a shipped preset
(CDD_Chain/presets/<name>.json) whose values act as defaults; every other top-level key
overrides the preset, nested objects merging one level deep.

Functions:
- `list_presets` / `load_preset`: the shipped preset documents.
- `resolve_document`: merge a document over its preset.
- `parse_config`: validated `ExperimentConfig` from a document.
- `serialize_config`: the fully resolved document of a config.
- `load_experiment_config`: read and parse a JSON file.
"""

# Built-in modules
import json
import logging
import math
import os
from dataclasses import asdict, dataclass, field
from importlib import resources
from typing import Optional

# External modules
import numpy as np

# Local imports
from .chain_models import VARIANTS, Z_PHASES, ControlFieldSpec, CouplingSet
from .effective_hamiltonian import CHAIN_VARIANTS
from .errors import ConfigError
from .noise_lab import SCHEMES, OUParams

CURVES = ("exact", "uncontrolled", "effective", "jw")
BASELINES = ("chain", "effective", "gate_field")
CONCURRENCE_MODES = ("averaged_state", "mean_of_realizations")
OBSERVABLE_KINDS = ("concurrence", "purity", "fidelity", "site_fidelity")
SWEEP_KEYS = ("n_y", "t_c", "effective_variant")
TOP_LEVEL_KEYS = (
    "preset",
    "description",
    "n_sites",
    "couplings",
    "drive",
    "control",
    "sweep",
    "noise",
    "initial_state",
    "observables",
    "time_grid",
    "curves",
    "baseline",
    "effective_variant",
    "integrator",
    "concurrence_mode",
    "output",
)
NOISE_DEFAULTS = {
    "mu": 0.0,
    "sigma": 2.0,
    "tau": 0.5,
    "realizations": 20,
    "seed": 0,
    "start_at_mean": False,
    "literal_bath_sum": False,
    "scheme": "exact",
}
INTEGRATOR_DEFAULTS = {"step": None, "max_step_drift": 1e-5, "stroboscopic": False}
OUTPUT_DEFAULTS = {"dir": None, "svg": False, "xlsx": False, "noise_csv": False}
MERGED_SECTIONS = ("control", "noise", "time_grid", "integrator", "output")


@dataclass(frozen=True)
class ExperimentConfig:
    """A validated experiment. Field values are plain JSON types."""

    n_sites: int
    couplings: dict
    control: dict
    initial_state: str
    observables: list
    time_grid: dict
    preset: Optional[str] = None
    description: str = ""
    drive: Optional[dict] = None
    sweep: Optional[dict] = None
    noise: dict = field(default_factory=lambda: dict(NOISE_DEFAULTS))
    curves: Optional[list] = None
    baseline: str = "chain"
    effective_variant: Optional[str] = None
    integrator: dict = field(default_factory=lambda: dict(INTEGRATOR_DEFAULTS))
    concurrence_mode: str = "averaged_state"
    output: dict = field(default_factory=lambda: dict(OUTPUT_DEFAULTS))

    @property
    def name(self) -> str:
        return self.preset or "experiment"

    def coupling_set(self) -> CouplingSet:
        N = self.n_sites
        if "lambdas" in self.couplings:
            lambdas = self.couplings["lambdas"]
        elif "uniform" in self.couplings:
            lambdas = [self.couplings["uniform"]] * (N - 1)
        else:
            lambdas = CouplingSet.state_transfer(N).lambdas
        drives = None
        if self.drive is not None:
            drives = self.drive.get("amplitudes") or [self.drive["uniform"]] * N
        return CouplingSet(np.asarray(lambdas, dtype=float), drives, self.control.get("t_g"))

    def control_spec(self, **overrides) -> ControlFieldSpec:
        control = self.control
        values = {
            "n_x": float(control["n_x"]),
            "n_y": float(control["n_y"]),
            "t_c": float(control["t_c"]),
            "variant": control.get("variant", "standard"),
            "n_x1": control.get("n_x1"),
            "n_y1": control.get("n_y1"),
        }
        if self.drive is not None:
            values["n_z"] = float(self.drive["n_z"])
            values["drive_z_phase"] = self.drive.get("z_phase", "sin")
        values.update(overrides)
        return ControlFieldSpec(**values)

    def ou_params(self) -> OUParams:
        return OUParams(self.noise["mu"], self.noise["sigma"], self.noise["tau"])

    def times(self) -> np.ndarray:
        grid = self.time_grid
        return np.linspace(grid["start"], grid["stop"], int(grid["num"]))

    def sweep_values(self) -> list:
        """[(key, value)] per curve set; [(None, None)] without a sweep."""
        if not self.sweep:
            return [(None, None)]
        key, values = next(iter(self.sweep.items()))
        return [(key, value) for value in values]


def presets_dir():
    return resources.files("CDD_Chain") / "presets"


def list_presets() -> list:
    """Sorted names of the shipped presets."""
    return sorted(
        entry.name[: -len(".json")]
        for entry in presets_dir().iterdir()
        if entry.name.endswith(".json")
    )


def load_preset(name: str) -> dict:
    """
    Raises:
        ConfigError: unknown preset name.
    """
    entry = presets_dir() / f"{name}.json"
    if not entry.is_file():
        logging.error(f"Unknown preset '{name}'")
        raise ConfigError(f"Unknown preset '{name}'. Available: {', '.join(list_presets())}")
    document = json.loads(entry.read_text(encoding="utf-8"))
    document["preset"] = name
    return document


def merge_documents(base: dict, overrides: dict) -> dict:
    """Top-level override; the sections in MERGED_SECTIONS merge one level deep."""
    merged = dict(base)
    for key, value in overrides.items():
        if key in MERGED_SECTIONS and isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = {**merged[key], **value}
        else:
            merged[key] = value
    return merged


def resolve_document(document: dict) -> dict:
    """The document merged over its preset (if it names one)."""
    if not isinstance(document, dict):
        raise ConfigError("An experiment config must be a JSON object")
    if document.get("preset"):
        return merge_documents(load_preset(document["preset"]), document)
    return dict(document)


# ---------- validation helpers ----------


def _fail(message: str):
    logging.error(f"Invalid config: {message}")
    raise ConfigError(message)


def _number(value, name: str, minimum=None, strict=False) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
        _fail(f"'{name}' must be a finite number, got {value!r}")
    if minimum is not None and (value <= minimum if strict else value < minimum):
        _fail(f"'{name}' must be {'>' if strict else '>='} {minimum}, got {value}")
    return value


def _integer(value, name: str, minimum=None) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        _fail(f"'{name}' must be an integer, got {value!r}")
    if minimum is not None and value < minimum:
        _fail(f"'{name}' must be >= {minimum}, got {value}")
    return value


def _boolean(value, name: str) -> bool:
    if not isinstance(value, bool):
        _fail(f"'{name}' must be true or false, got {value!r}")
    return value


def _triple(value, name: str) -> list:
    if not isinstance(value, (list, tuple)) or len(value) != 3:
        _fail(f"'{name}' must be a triple of numbers, got {value!r}")
    return [_number(v, name) for v in value]


def _bits(value, n_sites: int, name: str) -> str:
    if not isinstance(value, str) or len(value) != n_sites or set(value) - {"0", "1"}:
        _fail(f"'{name}' must be a bitstring of length {n_sites}, got {value!r}")
    return value


def _choice(value, options, name: str):
    if value not in options:
        _fail(f"'{name}' must be one of {list(options)}, got {value!r}")
    return value


def _keys(section: dict, allowed, name: str) -> None:
    if not isinstance(section, dict):
        _fail(f"'{name}' must be an object")
    unknown = set(section) - set(allowed)
    if unknown:
        _fail(f"Unknown keys in '{name}': {sorted(unknown)}")


def _parse_couplings(section, N: int) -> dict:
    _keys(section, ("lambdas", "uniform", "profile"), "couplings")
    if len(section) != 1:
        _fail("'couplings' needs exactly one of 'lambdas', 'uniform' or 'profile'")
    if "lambdas" in section:
        lambdas = section["lambdas"]
        if not isinstance(lambdas, list) or len(lambdas) != N - 1:
            _fail(f"'couplings.lambdas' must hold {N - 1} triples")
        return {"lambdas": [_triple(t, "couplings.lambdas") for t in lambdas]}
    if "uniform" in section:
        return {"uniform": _triple(section["uniform"], "couplings.uniform")}
    return {"profile": _choice(section["profile"], ("state_transfer",), "couplings.profile")}


def _parse_drive(section, N: int) -> Optional[dict]:
    if section is None:
        return None
    _keys(section, ("amplitudes", "uniform", "n_z", "z_phase"), "drive")
    drive = {}
    if ("amplitudes" in section) == ("uniform" in section):
        _fail("'drive' needs exactly one of 'amplitudes' or 'uniform'")
    if "amplitudes" in section:
        amplitudes = section["amplitudes"]
        if not isinstance(amplitudes, list) or len(amplitudes) != N:
            _fail(f"'drive.amplitudes' must hold {N} triples")
        drive["amplitudes"] = [_triple(t, "drive.amplitudes") for t in amplitudes]
    else:
        drive["uniform"] = _triple(section["uniform"], "drive.uniform")
    if "n_z" not in section:
        _fail("'drive.n_z' is required")
    drive["n_z"] = _number(section["n_z"], "drive.n_z")
    drive["z_phase"] = _choice(section.get("z_phase", "sin"), Z_PHASES, "drive.z_phase")
    return drive


def _parse_control(section) -> dict:
    _keys(section, ("variant", "n_x", "n_y", "t_c", "n_x1", "n_y1", "t_g"), "control")
    for key in ("n_x", "n_y", "t_c"):
        if key not in section:
            _fail(f"'control.{key}' is required")
    control = {
        "variant": _choice(section.get("variant", "standard"), VARIANTS, "control.variant"),
        "n_x": _number(section["n_x"], "control.n_x"),
        "n_y": _number(section["n_y"], "control.n_y"),
        "t_c": _number(section["t_c"], "control.t_c", 0, strict=True),
    }
    if control["variant"] == "gate":
        for key in ("n_x1", "n_y1"):
            if key not in section:
                _fail(f"'control.{key}' is required for the gate variant")
            control[key] = _number(section[key], f"control.{key}")
    t_g = section.get("t_g")
    control["t_g"] = None if t_g is None else _number(t_g, "control.t_g", 0, strict=True)
    return control


def _parse_sweep(section) -> Optional[dict]:
    if not section:
        return None
    _keys(section, SWEEP_KEYS, "sweep")
    if len(section) != 1:
        _fail("'sweep' takes exactly one key")
    key, values = next(iter(section.items()))
    if not isinstance(values, list) or not values:
        _fail(f"'sweep.{key}' must be a nonempty list")
    if key == "effective_variant":
        options = [v.value for v in CHAIN_VARIANTS]
        return {key: [_choice(v, options, "sweep.effective_variant") for v in values]}
    strict = key == "t_c"
    return {key: [_number(v, f"sweep.{key}", 0 if strict else None, strict=strict) for v in values]}


def _parse_noise(section) -> dict:
    _keys(section, NOISE_DEFAULTS, "noise")
    noise = {**NOISE_DEFAULTS, **section}
    _number(noise["mu"], "noise.mu")
    _number(noise["sigma"], "noise.sigma", 0)
    _number(noise["tau"], "noise.tau", 0, strict=True)
    _integer(noise["realizations"], "noise.realizations", 1)
    seed = _integer(noise["seed"], "noise.seed", 0)
    if seed >= 2**64:
        _fail("'noise.seed' must fit in 64 bits")
    _boolean(noise["start_at_mean"], "noise.start_at_mean")
    _boolean(noise["literal_bath_sum"], "noise.literal_bath_sum")
    _choice(noise["scheme"], SCHEMES, "noise.scheme")
    return noise


def _parse_observables(entries, N: int) -> list:
    if not isinstance(entries, list) or not entries:
        _fail("'observables' must be a nonempty list")
    parsed = []
    for entry in entries:
        if not isinstance(entry, dict):
            _fail("Every observable must be an object")
        kind = _choice(entry.get("kind"), OBSERVABLE_KINDS, "observables.kind")
        if kind in ("concurrence", "purity"):
            _keys(entry, ("kind", "pair"), f"observables.{kind}")
            pair = entry.get("pair")
            if not isinstance(pair, list) or len(pair) != 2:
                _fail(f"'{kind}' needs a pair [i, j]")
            i, j = (_integer(s, f"{kind}.pair", 1) for s in pair)
            if i == j or max(i, j) > N:
                _fail(f"Pair {pair} invalid for N={N}")
            parsed.append({"kind": kind, "pair": [i, j]})
        elif kind == "fidelity":
            _keys(entry, ("kind", "target"), "observables.fidelity")
            parsed.append({"kind": kind, "target": _bits(entry.get("target"), N, "fidelity.target")})
        else:
            _keys(entry, ("kind", "site", "bit"), "observables.site_fidelity")
            site = _integer(entry.get("site"), "site_fidelity.site", 1)
            if site > N:
                _fail(f"Site {site} invalid for N={N}")
            bit = _choice(entry.get("bit"), (0, 1), "site_fidelity.bit")
            parsed.append({"kind": kind, "site": site, "bit": bit})
    return parsed


def _parse_time_grid(section) -> dict:
    _keys(section, ("start", "stop", "num"), "time_grid")
    for key in ("start", "stop", "num"):
        if key not in section:
            _fail(f"'time_grid.{key}' is required")
    start = _number(section["start"], "time_grid.start", 0)
    stop = _number(section["stop"], "time_grid.stop")
    num = _integer(section["num"], "time_grid.num", 2)
    if stop <= start:
        _fail("'time_grid' must be strictly increasing (stop > start)")
    return {"start": start, "stop": stop, "num": num}


def _parse_integrator(section) -> dict:
    _keys(section, INTEGRATOR_DEFAULTS, "integrator")
    integrator = {**INTEGRATOR_DEFAULTS, **section}
    if integrator["step"] is not None:
        _number(integrator["step"], "integrator.step", 0, strict=True)
    _number(integrator["max_step_drift"], "integrator.max_step_drift", 0, strict=True)
    _boolean(integrator["stroboscopic"], "integrator.stroboscopic")
    return integrator


def _parse_output(section) -> dict:
    _keys(section, OUTPUT_DEFAULTS, "output")
    output = {**OUTPUT_DEFAULTS, **section}
    if output["dir"] is not None and not isinstance(output["dir"], str):
        _fail("'output.dir' must be a path string")
    for key in ("svg", "xlsx", "noise_csv"):
        _boolean(output[key], f"output.{key}")
    return output


def parse_config(document: dict) -> ExperimentConfig:
    """
    Validate a config document (merged over its preset) into an ExperimentConfig.

    Raises:
        ConfigError: unknown preset or key, missing field, wrong type or range.
    """
    document = resolve_document(document)
    unknown = set(document) - set(TOP_LEVEL_KEYS)
    if unknown:
        _fail(f"Unknown config keys: {sorted(unknown)}")
    for key in ("n_sites", "couplings", "control", "initial_state", "observables", "time_grid"):
        if key not in document:
            _fail(f"'{key}' is required")

    N = _integer(document["n_sites"], "n_sites", 2)
    curves = document.get("curves")
    if curves is not None:
        if not isinstance(curves, list) or not curves:
            _fail("'curves' must be a nonempty list or null")
        curves = [_choice(c, CURVES, "curves") for c in curves]
    effective_variant = document.get("effective_variant")
    if effective_variant is not None:
        _choice(effective_variant, [v.value for v in CHAIN_VARIANTS], "effective_variant")
    description = document.get("description", "")
    if not isinstance(description, str):
        _fail("'description' must be a string")

    config = ExperimentConfig(
        n_sites=N,
        couplings=_parse_couplings(document["couplings"], N),
        control=_parse_control(document["control"]),
        initial_state=_bits(document["initial_state"], N, "initial_state"),
        observables=_parse_observables(document["observables"], N),
        time_grid=_parse_time_grid(document["time_grid"]),
        preset=document.get("preset"),
        description=description,
        drive=_parse_drive(document.get("drive"), N),
        sweep=_parse_sweep(document.get("sweep")),
        noise=_parse_noise(document.get("noise", {})),
        curves=curves,
        baseline=_choice(document.get("baseline", "chain"), BASELINES, "baseline"),
        effective_variant=effective_variant,
        integrator=_parse_integrator(document.get("integrator", {})),
        concurrence_mode=_choice(
            document.get("concurrence_mode", "averaged_state"), CONCURRENCE_MODES, "concurrence_mode"
        ),
        output=_parse_output(document.get("output", {})),
    )
    if config.baseline == "gate_field" and config.control.get("t_g") is None:
        _fail("The gate_field baseline needs 'control.t_g'")
    logging.debug(f"Parsed config '{config.name}' (N={N})")
    return config


def serialize_config(cfg: ExperimentConfig) -> dict:
    """The fully resolved document; parse_config(serialize_config(cfg)) == cfg."""
    document = asdict(cfg)
    if document["preset"] is None:
        del document["preset"]
    return document


def with_overrides(cfg: ExperimentConfig, **changes) -> ExperimentConfig:
    """Re-validated copy with top-level fields replaced (nested dicts merged)."""
    return parse_config(merge_documents(serialize_config(cfg), changes))


def load_experiment_config(path: str) -> ExperimentConfig:
    """
    Read and parse an experiment config file.

    Raises:
        ConfigError: missing file, invalid JSON or invalid content.
    """
    if not os.path.exists(path):
        logging.error(f"Experiment config not found: {path}")
        raise ConfigError(f"Experiment config not found: {path}")
    try:
        with open(path, "r", encoding="utf-8") as f:
            document = json.load(f)
    except json.JSONDecodeError as e:
        logging.error(f"Invalid JSON in {path}: {e}")
        raise ConfigError(f"Invalid JSON in {path}: {e}") from e
    return parse_config(document)
