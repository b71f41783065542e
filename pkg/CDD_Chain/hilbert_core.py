# CDD Chain Simulator - Hilbert space core
# Copyright (C) 2025-2026 CDD Chain contributors
#
# SPDX-License-Identifier: GPL-3.0-or-later
# See LICENSE file for full license text.

"""
Dense linear algebra over the 2^N dimensional Hilbert space of a spin-1/2 chain.

Conventions:
- Site 1 is the leftmost tensor factor, i.e. the most significant bit of a basis index.
  |1000> therefore means "first spin flipped".
- sigma_z |s> = (-1)^s |s>, so |0> is the +1 eigenstate of sigma_z.
- Operators are plain complex numpy arrays of shape (2^N, 2^N).

Functions:
- `basis_state`: computational basis state from a bit list.
- `embed_pauli` / `embed_operator`: single-site operators lifted to the chain.
- `bond_operator`: two-site product on neighbouring sites.
- `collective_pauli`: sum of one Pauli axis over a set of sites.
- `reduced_density`: reduced density matrix of any site subset (state or density input).
- `partial_trace_pair`: two-spin reduced density with its site pair attached.
- `apply_local`: apply a product of single-site 2x2 operators to a state without
  building the 2^N x 2^N matrix.
"""

# Built-in modules
import logging
from dataclasses import dataclass, field
from functools import reduce
from typing import Sequence

# External modules
import numpy as np

# Local imports
from .errors import ConstraintViolation

NORM_TOL = 1e-10
HERMITIAN_TOL = 1e-12
DENSITY_TOL = 1e-10
MAX_EXACT_SITES = 12

IDENTITY2 = np.eye(2, dtype=complex)
PAULI = {
    "x": np.array([[0, 1], [1, 0]], dtype=complex),
    "y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "z": np.array([[1, 0], [0, -1]], dtype=complex),
}

# Alias used in signatures: a dense complex (2^N, 2^N) array
OperatorMatrix = np.ndarray


@dataclass(frozen=True)
class SpinState:
    """Normalized state vector of an N-site chain."""

    amplitudes: np.ndarray
    n_sites: int

    def __post_init__(self):
        amplitudes = np.array(self.amplitudes, dtype=complex).reshape(-1)
        if self.n_sites < 1 or amplitudes.size != 2**self.n_sites:
            raise ConstraintViolation(
                f"State of length {amplitudes.size} does not match {self.n_sites} sites"
            )
        norm = np.linalg.norm(amplitudes)
        if abs(norm**2 - 1.0) > NORM_TOL:
            raise ConstraintViolation(f"State is not normalized (norm^2 = {norm**2:.3e})")
        amplitudes.setflags(write=False)
        object.__setattr__(self, "amplitudes", amplitudes)

    @property
    def dim(self) -> int:
        return 2**self.n_sites

    def density(self) -> np.ndarray:
        return np.outer(self.amplitudes, self.amplitudes.conj())


@dataclass(frozen=True)
class TwoSpinDensity:
    """4x4 reduced density matrix of the ordered site pair (i, j); site i is the left factor."""

    entries: np.ndarray
    site_pair: tuple = field(default=(1, 2))

    def __post_init__(self):
        entries = np.array(self.entries, dtype=complex)
        if entries.shape != (4, 4):
            raise ConstraintViolation(f"Two-spin density must be 4x4, got {entries.shape}")
        entries.setflags(write=False)
        object.__setattr__(self, "entries", entries)
        object.__setattr__(self, "site_pair", tuple(int(s) for s in self.site_pair))

    def violations(self, tol: float = DENSITY_TOL) -> list:
        """List the density-matrix axioms this matrix breaks beyond `tol`."""
        problems = []
        rho = self.entries
        if np.max(np.abs(rho - rho.conj().T)) > tol:
            problems.append("not Hermitian")
        if abs(np.trace(rho) - 1.0) > tol:
            problems.append(f"trace {np.trace(rho).real:.12f} != 1")
        eigenvalues = np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))
        if eigenvalues.min() < -tol:
            problems.append(f"negative eigenvalue {eigenvalues.min():.3e}")
        return problems


def check_exact_size(n_sites: int, limit: int = MAX_EXACT_SITES) -> None:
    """Reject chains too large for the dense exact path."""
    if n_sites < 1:
        raise ConstraintViolation(f"Number of sites must be positive, got {n_sites}")
    if n_sites > limit:
        logging.error(f"N={n_sites} exceeds the dense limit of {limit} sites")
        raise ConstraintViolation(
            f"N={n_sites} exceeds the dense exact-path limit of {limit} sites"
        )


def _check_site(site: int, n_sites: int) -> None:
    if not 1 <= site <= n_sites:
        raise ConstraintViolation(f"Site {site} out of range 1..{n_sites}")


def kron_all(factors: Sequence[np.ndarray]) -> np.ndarray:
    return reduce(np.kron, factors)


def basis_state(bits) -> SpinState:
    """
    Computational basis state for a bit sequence, site 1 first.

    Parameters:
        bits (Sequence[int] | str): e.g. [1, 0, 0, 0] or "1000".

    Returns:
        SpinState: unit vector with a single 1 at int(bits, 2).
    """
    bits = [int(b) for b in bits]
    if not bits:
        raise ConstraintViolation("Bit list must be nonempty")
    if any(b not in (0, 1) for b in bits):
        raise ConstraintViolation(f"Bits must be 0 or 1, got {bits}")
    index = int("".join(str(b) for b in bits), 2)
    amplitudes = np.zeros(2 ** len(bits), dtype=complex)
    amplitudes[index] = 1.0
    return SpinState(amplitudes, len(bits))


def embed_operator(op: np.ndarray, site: int, n_sites: int) -> OperatorMatrix:
    """I x ... x op x ... x I with `op` in tensor slot `site` (slot 1 leftmost)."""
    _check_site(site, n_sites)
    left = np.eye(2 ** (site - 1), dtype=complex)
    right = np.eye(2 ** (n_sites - site), dtype=complex)
    return np.kron(np.kron(left, op), right)


def embed_pauli(axis: str, site: int, n_sites: int) -> OperatorMatrix:
    if axis not in PAULI:
        raise ConstraintViolation(f"Unknown Pauli axis '{axis}'")
    return embed_operator(PAULI[axis], site, n_sites)


def bond_operator(axis_a: str, axis_b: str, site: int, n_sites: int) -> OperatorMatrix:
    """sigma_a^(site) sigma_b^(site+1)."""
    _check_site(site, n_sites)
    _check_site(site + 1, n_sites)
    op = np.kron(PAULI[axis_a], PAULI[axis_b])
    left = np.eye(2 ** (site - 1), dtype=complex)
    right = np.eye(2 ** (n_sites - site - 1), dtype=complex)
    return np.kron(np.kron(left, op), right)


def collective_pauli(axis: str, n_sites: int, sites=None) -> OperatorMatrix:
    """Sum of sigma_axis over `sites` (all sites when None)."""
    sites = range(1, n_sites + 1) if sites is None else sites
    total = np.zeros((2**n_sites, 2**n_sites), dtype=complex)
    for site in sites:
        total += embed_pauli(axis, site, n_sites)
    return total


def is_hermitian(op: np.ndarray, tol: float = HERMITIAN_TOL) -> bool:
    return bool(np.max(np.abs(op - op.conj().T), initial=0.0) <= tol)


def as_amplitudes(state) -> np.ndarray:
    if isinstance(state, SpinState):
        return state.amplitudes
    return np.asarray(state, dtype=complex)


def reduced_density(state, sites: Sequence[int], n_sites: int) -> np.ndarray:
    """
    Reduced density matrix of the ordered site list `sites`.

    Parameters:
        state: SpinState, state vector, or full density matrix of the chain.
        sites (Sequence[int]): 1-based, distinct; the first listed site is the leftmost factor.
        n_sites (int): chain length.

    Returns:
        np.ndarray: (2^k, 2^k) reduced density matrix, k = len(sites).
    """
    sites = [int(s) for s in sites]
    for s in sites:
        _check_site(s, n_sites)
    if len(set(sites)) != len(sites):
        raise ConstraintViolation(f"Sites must be distinct, got {sites}")
    keep = [s - 1 for s in sites]
    traced = [a for a in range(n_sites) if a not in keep]
    k = len(keep)

    data = as_amplitudes(state)
    if data.ndim == 1:
        if data.size != 2**n_sites:
            raise ConstraintViolation("State dimension does not match the chain")
        psi = data.reshape((2,) * n_sites)
        rho = np.tensordot(psi, psi.conj(), axes=(traced, traced))
        # tensordot keeps the surviving axes in increasing order
        remaining = sorted(keep)
        perm = [remaining.index(a) for a in keep]
        rho = rho.transpose(perm + [p + k for p in perm])
    else:
        if data.shape != (2**n_sites, 2**n_sites):
            raise ConstraintViolation("Density dimension does not match the chain")
        rho_t = data.reshape((2,) * (2 * n_sites))
        row_labels = list(range(n_sites))
        col_labels = [a if a in traced else n_sites + a for a in range(n_sites)]
        out_labels = keep + [n_sites + a for a in keep]
        rho = np.einsum(rho_t, row_labels + col_labels, out_labels)
    return rho.reshape(2**k, 2**k)


def partial_trace_pair(rho, i: int, j: int, n_sites: int = None) -> TwoSpinDensity:
    """
    Two-spin reduced density of sites (i, j), tracing out every other spin.

    Parameters:
        rho: SpinState, state vector or density matrix.
        i, j (int): distinct 1-based sites; i is the left tensor factor of the result.
        n_sites (int | None): chain length; inferred from the input dimension when None.

    Returns:
        TwoSpinDensity
    """
    data = as_amplitudes(rho)
    if n_sites is None:
        n_sites = int(round(np.log2(data.shape[0])))
    if i == j:
        raise ConstraintViolation(f"Pair sites must differ, got ({i}, {j})")
    return TwoSpinDensity(reduced_density(data, [i, j], n_sites), (i, j))


def apply_local(local_ops: Sequence[np.ndarray], psi: np.ndarray) -> np.ndarray:
    """
    Apply the product operator local_ops[0] x local_ops[1] x ... to a state vector.

    Works on a reshaped tensor, one 2x2 contraction per site. `psi` may carry extra
    trailing axes (batched states).
    """
    n_sites = len(local_ops)
    extra = psi.shape[1:]
    tensor = psi.reshape((2,) * n_sites + extra)
    for axis, op in enumerate(local_ops):
        tensor = np.tensordot(op, tensor, axes=([1], [axis]))
        tensor = np.moveaxis(tensor, 0, axis)
    return tensor.reshape((2**n_sites,) + extra)
