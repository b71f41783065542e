# CDD Chain Simulator - Effective Hamiltonians
# Copyright (C) 2025-2026 CDD Chain contributors
#
# SPDX-License-Identifier: GPL-3.0-or-later
# See LICENSE file for full license text.

"""
Time-averaged (effective) Hamiltonians of the controlled chain.

In the frame of the control fields the chain evolves under U_c^dag(t) H U_c(t). Its
average over one control period t_c is the effective Hamiltonian; the next Magnus term
bounds the error of that approximation.

Closed forms per bond (X = sigma_x^(j) sigma_x^(j+1), XY = sigma_x^(j) sigma_y^(j+1), ...):

- hbar1 (n_y != 2 n_x):   (l1/2)(XX + ZZ) + ((l2 + l3)/4)(XX + 2YY + ZZ)
- hbar2 (n_y == 2 n_x):   hbar1 + ((l2 - l3)/4)(XY + YX)
- rotated_ising:          (l1/2)(XX + YY) + ((l2 + l3)/4)(XX + YY + 2ZZ)
- rotated_cross:          rotated_ising + ((l2 - l3)/4)(XZ + ZX)   (rotated z integer == 2 n_x)

Drive fields average to static fields (with n_z = n_y - n_x):

- with_drive_1: (b1/2) sx + (b2/2) sy + b3 term
- with_drive_2: with_drive_1 + (b2/4) sx, and the resonant b3 term
  where the b3 term is (b3/4) sz for a cosine sigma_z drive, (b3/4) sx (with_drive_1) or
  b3 (sx/4 - sy/2) (with_drive_2) for a sine sigma_z drive.

Numerical routes sample the conjugated integrand on a uniform grid over one period and
work with its discrete Fourier coefficients; for the trigonometric-polynomial integrands
of integer control specs this is exact once the grid resolves the highest harmonic.
"""

# Built-in modules
import logging
import math
from enum import Enum

# External modules
import numpy as np

# Local imports
from .chain_models import (
    INTEGER_TOL,
    ControlFieldSpec,
    CouplingSet,
    FieldTerm,
    bath_hamiltonian,
    chain_hamiltonian,
    control_site_unitaries,
    drive_terms,
    sum_terms,
)
from .errors import ConstraintViolation, NumericalFailure
from .hilbert_core import OperatorMatrix, bond_operator, embed_pauli, kron_all

QUADRATURE_NODES = 512
QUADRATURE_TOL = 1e-9


class EffectiveVariant(str, Enum):
    HBAR1 = "hbar1"
    HBAR2 = "hbar2"
    ROTATED_ISING = "rotated_ising"
    ROTATED_CROSS = "rotated_cross"
    WITH_DRIVE_1 = "with_drive_1"
    WITH_DRIVE_2 = "with_drive_2"


CHAIN_VARIANTS = (
    EffectiveVariant.HBAR1,
    EffectiveVariant.HBAR2,
    EffectiveVariant.ROTATED_ISING,
    EffectiveVariant.ROTATED_CROSS,
)
DRIVE_VARIANTS = (EffectiveVariant.WITH_DRIVE_1, EffectiveVariant.WITH_DRIVE_2)


def _is_resonant(spec: ControlFieldSpec) -> bool:
    return abs(spec.n_y - 2.0 * spec.n_x) <= INTEGER_TOL


def select_chain_variant(spec: ControlFieldSpec):
    """Closed-form tag for the control spec, or None when only numerical averaging applies."""
    if spec.variant == "standard":
        return EffectiveVariant.HBAR2 if _is_resonant(spec) else EffectiveVariant.HBAR1
    if spec.variant == "rotated":
        return EffectiveVariant.ROTATED_CROSS if _is_resonant(spec) else EffectiveVariant.ROTATED_ISING
    return None


def select_drive_variant(spec: ControlFieldSpec) -> EffectiveVariant:
    return EffectiveVariant.WITH_DRIVE_2 if _is_resonant(spec) else EffectiveVariant.WITH_DRIVE_1


def _bond_sum(n_sites: int, weighted_terms) -> OperatorMatrix:
    """sum over bonds j of sum over (weight_j, axis_a, axis_b) of weight_j * a^(j) b^(j+1)."""
    total = np.zeros((2**n_sites, 2**n_sites), dtype=complex)
    for weights, axis_a, axis_b in weighted_terms:
        for j, weight in enumerate(weights, start=1):
            if weight != 0.0:
                total += weight * bond_operator(axis_a, axis_b, j, n_sites)
    return total


def effective_chain(c: CouplingSet, n_sites: int, v) -> OperatorMatrix:
    """
    Closed-form effective chain Hamiltonian for the tag `v`.

    Parameters:
        c (CouplingSet): couplings with N-1 bonds.
        n_sites (int): N >= 2.
        v (EffectiveVariant | str): one of hbar1, hbar2, rotated_ising, rotated_cross.

    Returns:
        OperatorMatrix
    """
    v = EffectiveVariant(v)
    if v not in CHAIN_VARIANTS:
        raise ConstraintViolation(f"'{v.value}' is not a chain variant")
    if n_sites < 2 or c.lambdas.shape[0] != n_sites - 1:
        raise ConstraintViolation(f"Couplings do not describe a chain of {n_sites} sites")
    l1, l2, l3 = c.lambdas[:, 0], c.lambdas[:, 1], c.lambdas[:, 2]
    half1 = l1 / 2.0
    quarter23 = (l2 + l3) / 4.0
    cross = (l2 - l3) / 4.0

    if v in (EffectiveVariant.HBAR1, EffectiveVariant.HBAR2):
        terms = [
            (half1 + quarter23, "x", "x"),
            (2.0 * quarter23, "y", "y"),
            (half1 + quarter23, "z", "z"),
        ]
        if v is EffectiveVariant.HBAR2:
            terms += [(cross, "x", "y"), (cross, "y", "x")]
    else:
        terms = [
            (half1 + quarter23, "x", "x"),
            (half1 + quarter23, "y", "y"),
            (2.0 * quarter23, "z", "z"),
        ]
        if v is EffectiveVariant.ROTATED_CROSS:
            terms += [(cross, "x", "z"), (cross, "z", "x")]
    return _bond_sum(n_sites, terms)


def effective_drive(c: CouplingSet, v, z_phase: str = "cos", n_sites: int = None) -> OperatorMatrix:
    """
    Static fields generated by the drive (n_z = n_y - n_x).

    Parameters:
        c (CouplingSet): must carry drive amplitudes.
        v (EffectiveVariant | str): with_drive_1 (n_y != 2 n_x) or with_drive_2 (n_y == 2 n_x).
        z_phase (str): time dependence of the sigma_z drive, "cos" or "sin".
        n_sites (int | None): defaults to the coupling set's chain length.
    """
    v = EffectiveVariant(v)
    if v not in DRIVE_VARIANTS:
        raise ConstraintViolation(f"'{v.value}' is not a drive variant")
    if c.drives is None:
        raise ConstraintViolation("Drive amplitudes are missing from the coupling set")
    if z_phase not in ("cos", "sin"):
        raise ConstraintViolation(f"Unknown drive phase '{z_phase}'")
    n_sites = c.n_sites if n_sites is None else n_sites
    resonant = v is EffectiveVariant.WITH_DRIVE_2

    total = np.zeros((2**n_sites, 2**n_sites), dtype=complex)
    for j, (b1, b2, b3) in enumerate(c.drives, start=1):
        cx = b1 / 2.0 + (b2 / 4.0 if resonant else 0.0)
        cy = b2 / 2.0
        cz = 0.0
        if z_phase == "cos":
            cz = b3 / 4.0
        else:
            cx += b3 / 4.0
            if resonant:
                cy -= b3 / 2.0
        for axis, coefficient in (("x", cx), ("y", cy), ("z", cz)):
            if coefficient != 0.0:
                total += coefficient * embed_pauli(axis, j, n_sites)
    return total


def _time_function(hamiltonian, n_sites: int):
    """Normalize a static matrix, a callable t -> matrix or a FieldTerm list to a callable."""
    if callable(hamiltonian):
        return hamiltonian
    if isinstance(hamiltonian, (list, tuple)) and all(isinstance(t, FieldTerm) for t in hamiltonian):
        return lambda t: sum_terms(hamiltonian, t, n_sites)
    matrix = np.asarray(hamiltonian, dtype=complex)
    return lambda t: matrix


def _grid_size(spec: ControlFieldSpec, n_sites: int, nodes: int) -> int:
    """Uniform nodes per period resolving every harmonic of the conjugated integrand."""
    per_site = max(abs(n_x) + abs(n_y) for n_x, n_y in spec.site_integers(n_sites))
    harmonics = 4 * n_sites * per_site + 2 * abs(spec.n_z or 0) + 2 * spec.max_integer
    needed = 2 ** math.ceil(math.log2(2 * harmonics + 16))
    return int(max(nodes, needed))


def _conjugated_samples(hamiltonian, spec: ControlFieldSpec, n_sites: int, nodes: int) -> np.ndarray:
    """U_c^dag(t_m) H(t_m) U_c(t_m) on t_m = m t_c / nodes, m = 0..nodes-1."""
    if not spec.is_integer:
        logging.error(f"Numerical averaging needs integer control integers: {spec}")
        raise ConstraintViolation("Numerical averaging needs a t_c-periodic (integer) control spec")
    h_of_t = _time_function(hamiltonian, n_sites)
    dim = 2**n_sites
    samples = np.empty((nodes, dim, dim), dtype=complex)
    for m in range(nodes):
        t = m * spec.t_c / nodes
        u = kron_all(control_site_unitaries(spec, n_sites, t))
        samples[m] = u.conj().T @ h_of_t(t) @ u
    return samples


def _check_convergence(coarse: np.ndarray, fine: np.ndarray, what: str) -> None:
    scale = max(1.0, float(np.max(np.abs(fine))))
    error = float(np.max(np.abs(coarse - fine)))
    logging.debug(f"{what} grid-doubling difference: {error:.3e}")
    if error > QUADRATURE_TOL * scale:
        logging.error(f"{what} did not converge under grid doubling ({error:.3e})")
        raise NumericalFailure(f"{what} did not converge under grid doubling ({error:.3e})")


def numerical_time_average(hamiltonian, spec: ControlFieldSpec, n_sites: int,
                           nodes: int = QUADRATURE_NODES, check_convergence: bool = True) -> OperatorMatrix:
    """
    (1/t_c) int_0^t_c U_c^dag(t) H(t) U_c(t) dt on a uniform periodic grid.

    Parameters:
        hamiltonian: static matrix, callable t -> matrix, or list of FieldTerm.
        spec (ControlFieldSpec): integer (periodic) control spec.
        n_sites (int): chain length.
        nodes (int): minimum number of grid nodes per period.
        check_convergence (bool): repeat on a doubled grid and compare.

    Raises:
        ConstraintViolation: for a non-periodic spec.
        NumericalFailure: when grid doubling changes the result beyond 1e-9.
    """
    size = _grid_size(spec, n_sites, nodes)
    average = _conjugated_samples(hamiltonian, spec, n_sites, size).mean(axis=0)
    if check_convergence:
        finer = _conjugated_samples(hamiltonian, spec, n_sites, 2 * size).mean(axis=0)
        _check_convergence(average, finer, "time average")
        average = finer
    return average


def decoupling_residual(spec: ControlFieldSpec, n_sites: int, literal_bath_sum: bool = False) -> float:
    """Operator norm of the averaged bath coupling with unit amplitudes B = (1, 1, 1)."""
    bath = bath_hamiltonian((1.0, 1.0, 1.0), n_sites, literal_bath_sum)
    average = numerical_time_average(bath, spec, n_sites, check_convergence=False)
    return float(np.linalg.norm(average, 2))


def verify_decoupling(spec: ControlFieldSpec, n_sites: int) -> dict:
    """
    Residual norms of every integral the control fields must cancel.

    Always reports "bath"; the gate variant also reports the averaged spin-1/spin-2
    couplings "xx_12", "yy_12" and "zz_12".
    """
    residuals = {"bath": decoupling_residual(spec, n_sites)}
    if spec.variant == "gate":
        for axis in ("x", "y", "z"):
            bond = bond_operator(axis, axis, 1, n_sites)
            average = numerical_time_average(bond, spec, n_sites, check_convergence=False)
            residuals[f"{axis}{axis}_12"] = float(np.linalg.norm(average, 2))
    for name, value in residuals.items():
        logging.debug(f"decoupling residual {name} = {value:.3e}")
    return residuals


def _harmonics(samples: np.ndarray) -> tuple:
    """Fourier coefficients C_k (leading axis) and their integer harmonic indices k."""
    nodes = samples.shape[0]
    coefficients = np.fft.fft(samples, axis=0) / nodes
    indices = np.rint(np.fft.fftfreq(nodes, d=1.0 / nodes)).astype(int)
    return coefficients, indices


def _second_order_from_samples(samples: np.ndarray, omega: float) -> np.ndarray:
    """
    -(i / 2 t_c) int_0^t_c dt1 int_0^t1 dt2 [H(t1), H(t2)] from uniform periodic samples.

    With H(t) = sum_k C_k exp(i k w t) the double integral reduces to
    -(1 / 2w) sum_{k != 0} (1/k) (2 [C_k, C_0] - [C_k, C_-k]).
    """
    coefficients, indices = _harmonics(samples)
    nodes = samples.shape[0]
    c0 = coefficients[0]
    keep = (indices != 0) & (np.abs(indices) < nodes // 2)
    ck = coefficients[keep]
    k = indices[keep]
    c_minus = coefficients[(-k) % nodes]
    with_c0 = ck @ c0 - c0 @ ck
    with_minus = ck @ c_minus - c_minus @ ck
    weights = (1.0 / k)[:, None, None]
    return -(1.0 / (2.0 * omega)) * np.sum(weights * (2.0 * with_c0 - with_minus), axis=0)


def magnus_second_order(hamiltonian, spec: ControlFieldSpec, n_sites: int,
                        nodes: int = QUADRATURE_NODES, check_convergence: bool = True) -> OperatorMatrix:
    """
    Second Magnus term of the toggling-frame chain Hamiltonian.

    Only the system Hamiltonian enters (bath operators are not part of `hamiltonian`).

    Raises:
        ConstraintViolation: for a non-periodic spec.
        NumericalFailure: when grid doubling changes the result beyond 1e-9.
    """
    size = _grid_size(spec, n_sites, nodes)
    term = _second_order_from_samples(
        _conjugated_samples(hamiltonian, spec, n_sites, size), spec.omega
    )
    if check_convergence:
        finer = _second_order_from_samples(
            _conjugated_samples(hamiltonian, spec, n_sites, 2 * size), spec.omega
        )
        _check_convergence(term, finer, "second-order Magnus term")
        term = finer
    return term


def magnus_pair_term(op_1: np.ndarray, f_1, op_2: np.ndarray, f_2, spec: ControlFieldSpec,
                     nodes: int = QUADRATURE_NODES) -> OperatorMatrix:
    """
    -(i / 2 t_c) int_0^t_c dt1 int_0^t1 dt2 f_1(t1) f_2(t2) [op_1, op_2].

    Evaluates a single pair of components of the second Magnus term, with f_1 and f_2
    scalar t_c-periodic functions.
    """
    times = np.arange(nodes) * spec.t_c / nodes
    a, indices = _harmonics(np.array([f_1(t) for t in times], dtype=complex))
    c, _ = _harmonics(np.array([f_2(t) for t in times], dtype=complex))
    omega, period = spec.omega, spec.t_c
    keep = (indices != 0) & (np.abs(indices) < nodes // 2)
    k = indices[keep]
    # int_0^T f_1(t) F_2(t) dt with F_2(t) = int_0^t f_2
    nested = a[0] * c[0] * period**2 / 2.0
    nested += np.sum(a[keep] * c[0] * period / (1j * k * omega))
    nested += np.sum(c[keep] / (1j * k * omega) * (period * a[(-k) % nodes] - period * a[0]))
    commutator = op_1 @ op_2 - op_2 @ op_1
    return -(1j / (2.0 * period)) * nested * commutator


def rotation_operator(n_sites: int) -> OperatorMatrix:
    """U_R = prod_j exp(-i pi sx^(j) / 4), which maps sz -> -sy and sy -> sz."""
    site = (np.eye(2) - 1j * np.array([[0, 1], [1, 0]])) / math.sqrt(2.0)
    return kron_all([site] * n_sites)


def effective_hamiltonian_for(spec: ControlFieldSpec, c: CouplingSet, n_sites: int,
                              variant=None) -> tuple:
    """
    Effective Hamiltonian of the full controlled model, including drive and gate terms.

    Uses the closed forms where they apply and numerical averaging otherwise (gate
    variant; drives with n_z != n_y - n_x or with the rotated variant). An explicit
    `variant` forces the closed chain form (e.g. the hbar2 reference of a robustness
    sweep with non-integer n_y).

    Returns:
        tuple[OperatorMatrix, str]: the Hamiltonian and a short description of the route.
    """
    routes = []
    chain_variant = EffectiveVariant(variant) if variant is not None else select_chain_variant(spec)
    if chain_variant is None:
        hbar = numerical_time_average(chain_hamiltonian(c, n_sites), spec, n_sites)
        routes.append("chain: numerical average")
    else:
        hbar = effective_chain(c, n_sites, chain_variant)
        routes.append(f"chain: {chain_variant.value}")

    if c.drives is not None:
        closed_drive = (
            spec.variant == "standard"
            and spec.n_z is not None
            and abs(spec.n_z - (spec.n_y - spec.n_x)) <= INTEGER_TOL
        )
        if closed_drive:
            drive_variant = select_drive_variant(spec)
            hbar = hbar + effective_drive(c, drive_variant, spec.drive_z_phase, n_sites)
            routes.append(f"drive: {drive_variant.value} ({spec.drive_z_phase})")
        else:
            hbar = hbar + numerical_time_average(drive_terms(c, spec, n_sites), spec, n_sites)
            routes.append("drive: numerical average")

    if spec.variant == "gate" and c.t_g is not None:
        hbar = hbar - (math.pi / (2.0 * c.t_g)) * embed_pauli("x", 1, n_sites)
        routes.append("gate: -(pi/2 t_g) sx^(1)")

    route = "; ".join(routes)
    logging.info(f"Effective Hamiltonian route: {route}")
    return hbar, route
