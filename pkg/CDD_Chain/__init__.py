# CDD Chain Simulator - Main package initialization
# Copyright (C) 2025-2026 CDD Chain contributors
#
# SPDX-License-Identifier: GPL-3.0-or-later
# See LICENSE file for full license text.

"""
CDD Chain Simulator

Continuous dynamical decoupling of spin chains coupled to a classical Ornstein-Uhlenbeck
bath: exact noisy dynamics, time-averaged effective Hamiltonians, a Jordan-Wigner fast path
for large chains, and a preset-driven experiment runner.
"""

__version__ = "0.1.0"
__author__ = "CDD Chain contributors"

# Import main modules for easier access
from . import errors
from . import hilbert_core
from . import chain_models
from . import effective_hamiltonian
from . import noise_lab
from . import propagator
from . import observables
from . import jw_fastpath

__all__ = [
    "errors",
    "hilbert_core",
    "chain_models",
    "effective_hamiltonian",
    "noise_lab",
    "propagator",
    "observables",
    "jw_fastpath",
    "experiment_config",
    "run_experiment",
    "writers",
    "experiment_cli",
]
