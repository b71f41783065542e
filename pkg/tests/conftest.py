# CDD Chain Simulator - Shared test fixtures
# Copyright (C) 2025-2026 CDD Chain contributors
#
# SPDX-License-Identifier: GPL-3.0-or-later
# See LICENSE file for full license text.

import numpy as np
import pytest

from CDD_Chain.chain_models import ControlFieldSpec, CouplingSet


def werner_density(p: float) -> np.ndarray:
    """p |Phi+><Phi+| + (1 - p) I/4."""
    phi = np.array([1, 0, 0, 1], dtype=complex) / np.sqrt(2)
    return p * np.outer(phi, phi.conj()) + (1 - p) * np.eye(4) / 4


def random_state(n_sites: int, seed: int = 0) -> np.ndarray:
    rng = np.random.default_rng(seed)
    psi = rng.normal(size=2**n_sites) + 1j * rng.normal(size=2**n_sites)
    return psi / np.linalg.norm(psi)


def random_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    z = (rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


@pytest.fixture
def standard_spec():
    return ControlFieldSpec(n_x=1, n_y=3, t_c=0.01)


@pytest.fixture
def resonant_spec():
    return ControlFieldSpec(n_x=1, n_y=2, t_c=0.01)


@pytest.fixture
def xyz_couplings():
    return CouplingSet.uniform(4, (0.5, 1.0, 0.25))


@pytest.fixture
def settings(tmp_path):
    """Runtime settings that keep logs and outputs inside tmp_path."""
    return {
        "log_level": "INFO",
        "log_dir": str(tmp_path / "logs"),
        "output_dir": str(tmp_path / "results"),
        "max_exact_sites": 12,
        "jobs": 1,
    }


@pytest.fixture(autouse=True)
def _restore_root_logger():
    """setup_logger attaches handlers to the root logger; drop them after each test."""
    import logging

    root = logging.getLogger()
    before = list(root.handlers)
    level = root.level
    yield
    for handler in list(root.handlers):
        if handler not in before:
            root.removeHandler(handler)
            handler.close()
    root.setLevel(level)
