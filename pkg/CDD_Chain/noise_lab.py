# CDD Chain Simulator - Classical bath noise
# Copyright (C) 2025-2026 CDD Chain contributors
#
# SPDX-License-Identifier: GPL-3.0-or-later
# See LICENSE file for full license text.

"""
Ornstein-Uhlenbeck noise for the classical bath field B = (B_x, B_y, B_z).

The process dB = -(B - mu) dt / tau + sigma sqrt(2 / tau) dW is sampled on a uniform grid.
Two update rules are available:

- "exact": B_{k+1} = mu + (B_k - mu) a + sigma sqrt(1 - a^2) xi with a = exp(-dt / tau).
  The stationary variance is sigma^2 for every dt.
- "euler": B_{k+1} = B_k - (B_k - mu) dt / tau + sigma sqrt(2 dt / tau) xi.
  Its stationary variance depends on dt (2 sigma^2 at dt = tau).

Both recursions are first-order linear filters over the Gaussian increments and run through
`scipy.signal.lfilter` on all three components at once.

Seeding: realization r of base seed s draws from
numpy.random.default_rng(SeedSequence(s, spawn_key=(r,))), so every realization is
reproducible on its own and independent of how many others are generated.
"""

# Built-in modules
import logging
import math
import os
from dataclasses import dataclass, field

# External modules
import numpy as np
import pandas as pd
from scipy.signal import lfilter

# Local imports
from .errors import ConstraintViolation

SCHEMES = ("exact", "euler")
GRID_TOL = 1e-9


@dataclass(frozen=True)
class OUParams:
    """mu: mean, sigma: stationary standard deviation, tau: correlation time."""

    mu: float = 0.0
    sigma: float = 2.0
    tau: float = 0.5

    def __post_init__(self):
        if not all(math.isfinite(v) for v in (self.mu, self.sigma, self.tau)):
            raise ConstraintViolation("Noise parameters must be finite")
        if self.sigma < 0:
            raise ConstraintViolation(f"sigma must be >= 0, got {self.sigma}")
        if self.tau <= 0:
            raise ConstraintViolation(f"tau must be > 0, got {self.tau}")


@dataclass(frozen=True)
class NoiseTrajectory:
    """
    Three OU paths on the grid times[k] = k dt.

    values has shape (len(times), 3) with columns (B_x, B_y, B_z).
    """

    times: np.ndarray
    values: np.ndarray
    seed: int
    params: OUParams
    realization: int = 0
    scheme: str = field(default="exact")

    def __post_init__(self):
        times = np.asarray(self.times, dtype=float)
        values = np.asarray(self.values, dtype=float)
        if values.shape != (times.size, 3):
            raise ConstraintViolation(
                f"Noise values of shape {values.shape} do not match {times.size} times"
            )
        if times.size > 1 and np.ptp(np.diff(times)) > GRID_TOL * max(1.0, times[-1]):
            raise ConstraintViolation("Noise grid spacing must be constant")
        times.setflags(write=False)
        values.setflags(write=False)
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "values", values)

    @property
    def dt(self) -> float:
        return float(self.times[1] - self.times[0]) if self.times.size > 1 else math.inf

    def at(self, t: float) -> np.ndarray:
        """Zero-order hold: the sample whose interval [t_k, t_k + dt) covers t."""
        index = int(math.floor(t / self.dt + GRID_TOL)) if self.times.size > 1 else 0
        return self.values[min(max(index, 0), self.times.size - 1)]


def realization_rng(seed: int, realization: int) -> np.random.Generator:
    """Independent, reproducible stream for realization r of base seed s."""
    return np.random.default_rng(np.random.SeedSequence(int(seed), spawn_key=(int(realization),)))


def realization_seed_label(seed: int, realization: int) -> str:
    return f"SeedSequence(entropy={int(seed)}, spawn_key=({int(realization)},))"


def ou_trajectory(p: OUParams, duration: float, dt: float, seed: int, realization: int = 0,
                  start_at_mean: bool = False, scheme: str = "exact") -> NoiseTrajectory:
    """
    Sample the three bath components on [0, duration].

    Parameters:
        p (OUParams): process parameters.
        duration (float): > 0; the grid covers it with ceil(duration / dt) steps.
        dt (float): 0 < dt <= duration.
        seed (int): base seed of the experiment.
        realization (int): realization index used to derive the stream.
        start_at_mean (bool): start at mu instead of a stationary draw.
        scheme (str): "exact" or "euler".

    Returns:
        NoiseTrajectory

    Raises:
        ConstraintViolation: for an invalid grid or scheme.
    """
    if not (math.isfinite(duration) and duration > 0):
        raise ConstraintViolation(f"Noise duration must be positive, got {duration}")
    if not (dt > 0 and dt <= duration * (1 + GRID_TOL)):
        logging.error(f"Invalid noise step dt={dt} for duration {duration}")
        raise ConstraintViolation(f"Noise step must satisfy 0 < dt <= duration, got {dt}")
    if scheme not in SCHEMES:
        raise ConstraintViolation(f"Unknown noise scheme '{scheme}'")

    steps = int(math.ceil(duration / dt - GRID_TOL))
    times = np.arange(steps + 1) * dt
    rng = realization_rng(seed, realization)
    xi = rng.standard_normal((steps + 1, 3))

    if scheme == "exact":
        decay = math.exp(-dt / p.tau)
        scale = p.sigma * math.sqrt(1.0 - decay**2)
    else:
        decay = 1.0 - dt / p.tau
        scale = p.sigma * math.sqrt(2.0 * dt / p.tau)

    start = np.zeros(3) if start_at_mean else p.sigma * xi[0]
    deviations = np.empty((steps + 1, 3))
    deviations[0] = start
    if steps:
        deviations[1:], _ = lfilter(
            [1.0], [1.0, -decay], scale * xi[1:], axis=0, zi=(decay * start)[None, :]
        )
    logging.debug(f"OU realization {realization}: {steps} steps of {dt:.3e} ({scheme})")
    return NoiseTrajectory(times, p.mu + deviations, int(seed), p, int(realization), scheme)


def ou_ensemble(p: OUParams, duration: float, dt: float, seed: int, realizations: int,
                start_at_mean: bool = False, scheme: str = "exact") -> list:
    """Trajectories for realizations 0..R-1, in realization order."""
    if realizations < 1:
        raise ConstraintViolation(f"Need at least one realization, got {realizations}")
    return [
        ou_trajectory(p, duration, dt, seed, r, start_at_mean, scheme)
        for r in range(realizations)
    ]


def autocorrelation(series: np.ndarray, lag: int) -> float:
    """Sample autocorrelation of a 1-D series at an integer lag."""
    series = np.asarray(series, dtype=float)
    centered = series - series.mean()
    if lag == 0:
        return 1.0
    return float(np.dot(centered[:-lag], centered[lag:]) / np.dot(centered, centered))


def dump_noise_csv(trajectory: NoiseTrajectory, path: str) -> str:
    """
    Write a trajectory to CSV with columns t, Bx, By, Bz.

    Raises:
        OSError: if the file cannot be written.
    """
    frame = pd.DataFrame(
        {
            "t": trajectory.times,
            "Bx": trajectory.values[:, 0],
            "By": trajectory.values[:, 1],
            "Bz": trajectory.values[:, 2],
        }
    )
    try:
        directory = os.path.dirname(path)
        if directory:
            os.makedirs(directory, exist_ok=True)
        frame.to_csv(path, index=False)
        logging.info(f"Noise trajectory saved at: {path}")
        return path
    except OSError as e:
        logging.error(f"Failed to save noise trajectory: {e}")
        raise
