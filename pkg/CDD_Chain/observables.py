# CDD Chain Simulator - Observables
# Copyright (C) 2025-2026 CDD Chain contributors
#
# SPDX-License-Identifier: GPL-3.0-or-later
# See LICENSE file for full license text.

"""
Scalar diagnostics of chain states.

Functions:
- `transfer_fidelity`: <psi_f| rho |psi_f> against a target basis or product state.
- `concurrence`: Wootters concurrence of a two-spin density matrix.
- `purity`: tr(rho^2).
- `rescaled_concurrence`: (N - 1) C.
- `site_fidelity`: <b| rho^(i) |b>, the population of bit b on spin i.
"""

# Built-in modules
import logging
from dataclasses import dataclass

# External modules
import numpy as np
from scipy import linalg

# Local imports
from .errors import ConstraintViolation, NumericalFailure
from .hilbert_core import PAULI, SpinState, TwoSpinDensity, as_amplitudes, reduced_density

BOUND_TOL = 1e-9
PSD_TOL = 1e-8

SIGMA_YY = np.kron(PAULI["y"], PAULI["y"])


@dataclass(frozen=True)
class ObservableSeries:
    """Values of one observable on a time grid."""

    times: np.ndarray
    values: np.ndarray
    label: str
    bounded: bool = True

    def __post_init__(self):
        times = np.asarray(self.times, dtype=float)
        values = np.asarray(self.values, dtype=float)
        if times.shape != values.shape:
            raise ConstraintViolation(f"Series '{self.label}' has mismatched times and values")
        if not np.all(np.isfinite(values)):
            raise NumericalFailure(f"Series '{self.label}' contains non-finite values")
        if self.bounded and values.size and (values.min() < -BOUND_TOL or values.max() > 1 + BOUND_TOL):
            raise NumericalFailure(f"Series '{self.label}' leaves [0, 1]")
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "values", values)

    def peak(self) -> tuple:
        """(time, value) of the maximum."""
        k = int(np.argmax(self.values))
        return float(self.times[k]), float(self.values[k])


def transfer_fidelity(rho, target) -> float:
    """
    <psi_f| rho |psi_f>; a state vector input counts as the rank-1 density |psi><psi|.

    Raises:
        ConstraintViolation: if the dimensions differ.
    """
    target = as_amplitudes(target)
    data = as_amplitudes(rho)
    if data.shape[0] != target.size:
        raise ConstraintViolation(
            f"State of dimension {data.shape[0]} does not match target of dimension {target.size}"
        )
    if data.ndim == 1:
        return float(abs(np.vdot(target, data)) ** 2)
    return float(np.real(target.conj() @ data @ target))


def _sqrt_density(rho: np.ndarray, tol: float) -> np.ndarray:
    """Square root of a density matrix, with eigenvalues down to -tol clipped to zero."""
    hermitian = 0.5 * (rho + rho.conj().T)
    eigenvalues, vectors = linalg.eigh(hermitian)
    if eigenvalues.min() < -tol:
        logging.error(f"Density has eigenvalue {eigenvalues.min():.3e} below -{tol:.0e}")
        raise NumericalFailure(f"Density matrix is not positive semidefinite ({eigenvalues.min():.3e})")
    roots = np.sqrt(np.clip(eigenvalues, 0.0, None))
    return (vectors * roots) @ vectors.conj().T


def concurrence(rho2, tol: float = PSD_TOL) -> float:
    """
    Wootters concurrence max(0, l1 - l2 - l3 - l4).

    The l_i are the square roots of the eigenvalues of rho rho_tilde in descending order,
    with rho_tilde = (sy x sy) rho^* (sy x sy). They are computed as the singular values of
    sqrt(rho) (sy x sy) sqrt(rho)^*, which stays accurate for rank-deficient inputs.
    Negative eigenvalues of rho down to -tol are clipped to zero first.

    Parameters:
        rho2 (TwoSpinDensity | np.ndarray): 4x4 density matrix.
        tol (float): accepted negativity of the input.

    Raises:
        NumericalFailure: input negativity beyond `tol`.
    """
    entries = rho2.entries if isinstance(rho2, TwoSpinDensity) else np.asarray(rho2, dtype=complex)
    if entries.shape != (4, 4):
        raise ConstraintViolation(f"Concurrence needs a 4x4 density, got {entries.shape}")
    root = _sqrt_density(entries, tol)
    roots = linalg.svdvals(root @ SIGMA_YY @ root.conj())
    value = roots[0] - roots[1] - roots[2] - roots[3]
    return float(min(max(value, 0.0), 1.0))


def purity(rho) -> float:
    """tr(rho^2); 1 for a state vector."""
    data = rho.entries if isinstance(rho, TwoSpinDensity) else as_amplitudes(rho)
    if data.ndim == 1:
        return 1.0
    return float(np.real(np.trace(data @ data)))


def rescaled_concurrence(C: float, N: int) -> float:
    return (N - 1) * C


def site_fidelity(rho, site: int, bit: int, n_sites: int) -> float:
    """<bit| rho^(site) |bit> with rho^(site) the single-spin reduced state."""
    if bit not in (0, 1):
        raise ConstraintViolation(f"Bit must be 0 or 1, got {bit}")
    data = rho if not isinstance(rho, SpinState) else rho.amplitudes
    single = reduced_density(data, [site], n_sites)
    return float(np.real(single[bit, bit]))

