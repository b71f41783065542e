# CDD Chain Simulator - Chain and field Hamiltonians
# Copyright (C) 2025-2026 CDD Chain contributors
#
# SPDX-License-Identifier: GPL-3.0-or-later
# See LICENSE file for full license text.

"""
Builders for every Hamiltonian of the decoupling scheme.

The module covers:
1. The nearest-neighbour XYZ chain H0 = sum_j sum_k lambda_jk sigma_k^(j) sigma_k^(j+1).
2. The bath coupling H_SB = sum_j B . sigma^(j), with the same B on every spin.
3. The control fields H_c(t) of the three variants:
   - standard: U_c(t) = prod_i exp(i w n_x sx t) exp(i w n_y sy t)
   - rotated:  U_c(t) = prod_i exp(i w n_x sx t) exp(-i w n_y sz t)
               (the rotated variant reads its sigma_z-field integer from n_y)
   - gate:     standard form with separate integers for spin 1
4. The drive fields H_d(t) that add effective static fields.
5. The gate field that flips spin 1 in time t_g while the chain stays decoupled.

Time-dependent Hamiltonians are expressed as lists of `FieldTerm` (a fixed operator times
a scalar function of time). The propagator integrates those lists directly; the
`*_hamiltonian(t)` functions sum them at one instant.

Functions:
- `chain_hamiltonian`, `bath_hamiltonian`, `bath_operators`
- `control_terms`, `control_hamiltonian`, `control_site_unitaries`, `control_unitary`
- `drive_terms`, `drive_hamiltonian`
- `gate_terms`, `gate_hamiltonian`, `gate_field_hamiltonian`
- `validate_gate_integers`
"""

# Built-in modules
import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

# External modules
import numpy as np

# Local imports
from .errors import ConstraintViolation
from .hilbert_core import (
    IDENTITY2,
    PAULI,
    OperatorMatrix,
    bond_operator,
    collective_pauli,
    embed_pauli,
    kron_all,
)

VARIANTS = ("standard", "rotated", "gate")
Z_PHASES = ("sin", "cos")
INTEGER_TOL = 1e-12
AXES = ("x", "y", "z")


@dataclass(frozen=True)
class CouplingSet:
    """
    Couplings of an N-site chain.

    lambdas: (N-1, 3) array, row j holds (lambda_j1, lambda_j2, lambda_j3) of bond (j, j+1).
    drives:  optional (N, 3) array, row j holds the drive amplitudes (b_j1, b_j2, b_j3).
    t_g:     optional gate duration.
    """

    lambdas: np.ndarray
    drives: Optional[np.ndarray] = None
    t_g: Optional[float] = None

    def __post_init__(self):
        lambdas = np.array(self.lambdas, dtype=float).reshape(-1, 3)
        if lambdas.shape[0] < 1:
            raise ConstraintViolation("A chain needs at least one bond")
        if not np.all(np.isfinite(lambdas)):
            raise ConstraintViolation("Couplings must be finite")
        lambdas.setflags(write=False)
        object.__setattr__(self, "lambdas", lambdas)
        if self.drives is not None:
            drives = np.array(self.drives, dtype=float).reshape(-1, 3)
            if drives.shape[0] != lambdas.shape[0] + 1:
                raise ConstraintViolation(
                    f"Expected {lambdas.shape[0] + 1} drive triples, got {drives.shape[0]}"
                )
            if not np.all(np.isfinite(drives)):
                raise ConstraintViolation("Drive amplitudes must be finite")
            drives.setflags(write=False)
            object.__setattr__(self, "drives", drives)
        if self.t_g is not None and not (math.isfinite(self.t_g) and self.t_g > 0):
            raise ConstraintViolation(f"Gate duration must be positive, got {self.t_g}")

    @property
    def n_sites(self) -> int:
        return self.lambdas.shape[0] + 1

    @classmethod
    def uniform(cls, n_sites: int, triple, drive=None, t_g=None) -> "CouplingSet":
        lambdas = np.tile(np.asarray(triple, dtype=float), (n_sites - 1, 1))
        drives = None if drive is None else np.tile(np.asarray(drive, dtype=float), (n_sites, 1))
        return cls(lambdas, drives, t_g)

    @classmethod
    def state_transfer(cls, n_sites: int) -> "CouplingSet":
        """Ising chain with lambda_j = sqrt(j (N - j)) on the x axis."""
        j = np.arange(1, n_sites)
        lambdas = np.zeros((n_sites - 1, 3))
        lambdas[:, 0] = np.sqrt(j * (n_sites - j))
        return cls(lambdas)

    def satisfies_free_fermion_constraint(self, tol: float = 1e-12) -> bool:
        """True when every bond has 2 lambda_1 + lambda_2 + lambda_3 = 0 and all bonds are equal."""
        l = self.lambdas
        uniform = np.allclose(l, l[0], atol=tol, rtol=0.0)
        return bool(uniform and abs(2 * l[0, 0] + l[0, 1] + l[0, 2]) <= tol)


@dataclass(frozen=True)
class ControlFieldSpec:
    """
    Control-field parameters.

    n_x, n_y: integers (or reals for robustness sweeps) shared by all spins; for the gate
              variant they apply to spins 2..N and n_x1, n_y1 apply to spin 1.
    t_c:      control period; omega = 2 pi / t_c.
    n_z:      drive integer (sigma_z drive frequency 2 omega n_z).
    drive_z_phase: "sin" or "cos" time dependence of the sigma_z drive.
    """

    n_x: float
    n_y: float
    t_c: float
    variant: str = "standard"
    n_z: Optional[float] = None
    n_x1: Optional[float] = None
    n_y1: Optional[float] = None
    drive_z_phase: str = "sin"

    def __post_init__(self):
        if not (math.isfinite(self.t_c) and self.t_c > 0):
            raise ConstraintViolation(f"Control period must be positive, got {self.t_c}")
        if self.variant not in VARIANTS:
            raise ConstraintViolation(f"Unknown control variant '{self.variant}'")
        if self.variant == "gate" and (self.n_x1 is None or self.n_y1 is None):
            raise ConstraintViolation("Gate variant needs n_x1 and n_y1 for spin 1")
        if self.drive_z_phase not in Z_PHASES:
            raise ConstraintViolation(f"Unknown drive phase '{self.drive_z_phase}'")

    @property
    def omega(self) -> float:
        return 2.0 * math.pi / self.t_c

    def site_integers(self, n_sites: int) -> list:
        """Per-site (n_x, n_y) pairs, site 1 first."""
        shared = (self.n_x, self.n_y)
        if self.variant == "gate":
            return [(self.n_x1, self.n_y1)] + [shared] * (n_sites - 1)
        return [shared] * n_sites

    def all_integers(self) -> list:
        values = [self.n_x, self.n_y]
        if self.variant == "gate":
            values += [self.n_x1, self.n_y1]
        if self.n_z is not None:
            values.append(self.n_z)
        return values

    @property
    def is_integer(self) -> bool:
        return all(abs(v - round(v)) <= INTEGER_TOL for v in self.all_integers())

    @property
    def max_integer(self) -> float:
        return max(abs(v) for v in self.all_integers())

    def validity_warnings(self, n_sites: int) -> list:
        """Human-readable reasons why decoupling may not hold for this spec."""
        warnings = []
        for site, (n_x, n_y) in enumerate(self.site_integers(n_sites), start=1):
            if abs(n_x - n_y) <= INTEGER_TOL:
                warnings.append(f"site {site}: n_x = n_y = {n_x:g} breaks decoupling")
        if not self.is_integer:
            warnings.append("non-integer field integers: control fields are not t_c-periodic")
        return warnings

    def with_values(self, **changes) -> "ControlFieldSpec":
        values = {name: getattr(self, name) for name in self.__dataclass_fields__}
        values.update(changes)
        return ControlFieldSpec(**values)


@dataclass(frozen=True)
class FieldTerm:
    """operator * coefficient(t)."""

    operator: np.ndarray
    coefficient: Callable[[float], float]
    label: str = field(default="")


def _constant(value: float) -> Callable[[float], float]:
    return lambda t: value


def sum_terms(terms, t: float, n_sites: int) -> OperatorMatrix:
    total = np.zeros((2**n_sites, 2**n_sites), dtype=complex)
    for term in terms:
        total += term.coefficient(t) * term.operator
    return total


def chain_hamiltonian(c: CouplingSet, n_sites: int) -> OperatorMatrix:
    """
    Open XYZ chain sum_j sum_k lambda_jk sigma_k^(j) sigma_k^(j+1).

    Raises:
        ConstraintViolation: if N < 2 or the couplings do not hold N-1 bonds.
    """
    if n_sites < 2:
        raise ConstraintViolation(f"A chain needs N >= 2, got {n_sites}")
    if c.lambdas.shape[0] != n_sites - 1:
        logging.error(f"Coupling list of length {c.lambdas.shape[0]} for N={n_sites}")
        raise ConstraintViolation(
            f"Expected {n_sites - 1} coupling triples, got {c.lambdas.shape[0]}"
        )
    hamiltonian = np.zeros((2**n_sites, 2**n_sites), dtype=complex)
    for j, triple in enumerate(c.lambdas, start=1):
        for axis, strength in zip(AXES, triple):
            if strength != 0.0:
                hamiltonian += strength * bond_operator(axis, axis, j, n_sites)
    return hamiltonian


def bath_sites(n_sites: int, literal_bath_sum: bool = False) -> range:
    """Spins that couple to the bath: all N, or the printed N-1 sum."""
    last = n_sites - 1 if literal_bath_sum else n_sites
    return range(1, max(last, 1) + 1)


def bath_operators(n_sites: int, literal_bath_sum: bool = False) -> tuple:
    """Collective (sum sx, sum sy, sum sz) over the bath-coupled spins."""
    sites = bath_sites(n_sites, literal_bath_sum)
    return tuple(collective_pauli(axis, n_sites, sites) for axis in AXES)


def bath_hamiltonian(B, n_sites: int, literal_bath_sum: bool = False) -> OperatorMatrix:
    """sum_j B_x sx^(j) + B_y sy^(j) + B_z sz^(j) with one B triple for every spin."""
    B = np.asarray(B, dtype=float)
    if B.shape != (3,) or not np.all(np.isfinite(B)):
        raise ConstraintViolation(f"Bath amplitudes must be a finite triple, got {B}")
    ops = bath_operators(n_sites, literal_bath_sum)
    return sum(b * op for b, op in zip(B, ops))


def _site_groups(spec: ControlFieldSpec, n_sites: int) -> list:
    """Consecutive sites sharing the same integers, as (sites, n_x, n_y)."""
    groups = []
    for site, pair in enumerate(spec.site_integers(n_sites), start=1):
        if groups and groups[-1][1:] == pair:
            groups[-1][0].append(site)
        else:
            groups.append(([site],) + tuple(pair))
    return groups


def control_terms(spec: ControlFieldSpec, n_sites: int) -> list:
    """The control Hamiltonian H_c(t) as a list of FieldTerm."""
    omega = spec.omega
    terms = []
    for sites, n_x, n_y in _site_groups(spec, n_sites):
        sx, sy, sz = (collective_pauli(axis, n_sites, sites) for axis in AXES)
        a = 2.0 * omega * n_x
        terms.append(FieldTerm(sx, _constant(-omega * n_x), f"sx{sites}"))
        if spec.variant == "rotated":
            terms.append(FieldTerm(sy, lambda t, a=a, b=omega * n_y: b * math.sin(a * t), f"sy{sites}"))
            terms.append(FieldTerm(sz, lambda t, a=a, b=omega * n_y: b * math.cos(a * t), f"sz{sites}"))
        else:
            terms.append(FieldTerm(sy, lambda t, a=a, b=omega * n_y: -b * math.cos(a * t), f"sy{sites}"))
            terms.append(FieldTerm(sz, lambda t, a=a, b=omega * n_y: b * math.sin(a * t), f"sz{sites}"))
    return terms


def control_hamiltonian(spec: ControlFieldSpec, t: float, n_sites: int) -> OperatorMatrix:
    """
    Instantaneous control field of the chosen variant.

    standard/gate: sum_i { w n_y [sin(2 w n_x t) sz - cos(2 w n_x t) sy] - w n_x sx }
    rotated:       sum_i { w n_y [sin(2 w n_x t) sy + cos(2 w n_x t) sz] - w n_x sx }
    """
    return sum_terms(control_terms(spec, n_sites), t, n_sites)


def _rotation(axis: str, angle: float) -> np.ndarray:
    """exp(i angle sigma_axis)."""
    return math.cos(angle) * IDENTITY2 + 1j * math.sin(angle) * PAULI[axis]


def control_site_unitaries(spec: ControlFieldSpec, n_sites: int, t: float) -> list:
    """Per-site 2x2 factors of U_c(t), site 1 first."""
    omega = spec.omega
    factors = []
    for n_x, n_y in spec.site_integers(n_sites):
        ux = _rotation("x", omega * n_x * t)
        if spec.variant == "rotated":
            factors.append(ux @ _rotation("z", -omega * n_y * t))
        else:
            factors.append(ux @ _rotation("y", omega * n_y * t))
    return factors


def control_unitary(spec: ControlFieldSpec, n_sites: int, t: float) -> OperatorMatrix:
    """Closed-form control propagator U_c(t) as a dense matrix."""
    return kron_all(control_site_unitaries(spec, n_sites, t))


def drive_terms(c: CouplingSet, spec: ControlFieldSpec, n_sites: int) -> list:
    """
    The drive field H_d(t) as a list of FieldTerm:
    sum_j b_j1 cos(2 w n_y t) sx + b_j2 cos(2 w n_x t) sy + b_j3 {sin|cos}(2 w n_z t) sz.
    """
    if c.drives is None:
        raise ConstraintViolation("Drive amplitudes are missing from the coupling set")
    if c.drives.shape[0] != n_sites:
        raise ConstraintViolation(f"Expected {n_sites} drive triples, got {c.drives.shape[0]}")
    if spec.n_z is None:
        raise ConstraintViolation("The drive needs the integer n_z")
    omega = spec.omega
    ops = [
        sum(b * embed_pauli(axis, j, n_sites) for j, b in enumerate(c.drives[:, k], start=1))
        for k, axis in enumerate(AXES)
    ]
    z_func = math.sin if spec.drive_z_phase == "sin" else math.cos
    return [
        FieldTerm(ops[0], lambda t, f=2.0 * omega * spec.n_y: math.cos(f * t), "drive_x"),
        FieldTerm(ops[1], lambda t, f=2.0 * omega * spec.n_x: math.cos(f * t), "drive_y"),
        FieldTerm(ops[2], lambda t, f=2.0 * omega * spec.n_z: z_func(f * t), "drive_z"),
    ]


def drive_hamiltonian(c: CouplingSet, spec: ControlFieldSpec, t: float, n_sites: int = None) -> OperatorMatrix:
    n_sites = c.n_sites if n_sites is None else n_sites
    return sum_terms(drive_terms(c, spec, n_sites), t, n_sites)


def gate_terms(spec: ControlFieldSpec, t_g: float, n_sites: int) -> list:
    """
    The gate part of H_gate(t) on spin 1 (without H_c):
    -(pi / 2 t_g) [cos(2 w n_y1 t) sx + sin(2 w n_y1 t) cos(2 w n_x1 t) sz
                   + sin(2 w n_y1 t) sin(2 w n_x1 t) sy].
    """
    if spec.variant != "gate":
        raise ConstraintViolation("Gate fields need the gate control variant")
    if t_g is None or not t_g > 0:
        logging.error(f"Invalid gate duration: {t_g}")
        raise ConstraintViolation(f"Gate duration must be positive, got {t_g}")
    theta = math.pi / (2.0 * t_g)
    a = 2.0 * spec.omega * spec.n_x1
    b = 2.0 * spec.omega * spec.n_y1
    sx, sy, sz = (embed_pauli(axis, 1, n_sites) for axis in AXES)
    return [
        FieldTerm(sx, lambda t: -theta * math.cos(b * t), "gate_x"),
        FieldTerm(sz, lambda t: -theta * math.sin(b * t) * math.cos(a * t), "gate_z"),
        FieldTerm(sy, lambda t: -theta * math.sin(b * t) * math.sin(a * t), "gate_y"),
    ]


def gate_hamiltonian(spec: ControlFieldSpec, t_g: float, t: float, n_sites: int) -> OperatorMatrix:
    """H_gate(t) = H_c(t) plus the spin-1 gate field."""
    terms = control_terms(spec, n_sites) + gate_terms(spec, t_g, n_sites)
    return sum_terms(terms, t, n_sites)


def gate_field_hamiltonian(t_g: float, n_sites: int) -> OperatorMatrix:
    """The plain static flip field -(pi / 2 t_g) sx^(1), used without control fields."""
    if t_g is None or not t_g > 0:
        raise ConstraintViolation(f"Gate duration must be positive, got {t_g}")
    return -(math.pi / (2.0 * t_g)) * embed_pauli("x", 1, n_sites)


def validate_gate_integers(n_x1, n_y1, n_x2, n_y2) -> tuple:
    """
    Check the integer conditions under which the spin-1 fields decouple the bath and the
    1-2 bond.

    Returns:
        tuple[bool, list[str]]: (all conditions hold, violated conditions).
    """
    conditions = [
        ("n_x1 != n_y1", n_x1 - n_y1),
        ("n_x2 != n_y2", n_x2 - n_y2),
        ("n_y2 != n_y1", n_y2 - n_y1),
        ("n_x1 != n_x2", n_x1 - n_x2),
        ("n_x1 + n_x2 != n_y2", n_x1 + n_x2 - n_y2),
        ("n_x1 - n_x2 != n_y2", n_x1 - n_x2 - n_y2),
        ("n_x2 - n_x1 != n_y2", n_x2 - n_x1 - n_y2),
        ("n_x1 + n_x2 != n_y1", n_x1 + n_x2 - n_y1),
        ("n_x1 - n_x2 != n_y1", n_x1 - n_x2 - n_y1),
        ("n_x2 - n_x1 != n_y1", n_x2 - n_x1 - n_y1),
        ("n_x1 - n_x2 + n_y1 + n_y2 != 0", n_x1 - n_x2 + n_y1 + n_y2),
        ("n_x1 - n_x2 - n_y1 - n_y2 != 0", n_x1 - n_x2 - n_y1 - n_y2),
        ("n_x1 - n_x2 + n_y1 - n_y2 != 0", n_x1 - n_x2 + n_y1 - n_y2),
        ("n_x1 - n_x2 - n_y1 + n_y2 != 0", n_x1 - n_x2 - n_y1 + n_y2),
        ("n_x1 + n_x2 - n_y1 - n_y2 != 0", n_x1 + n_x2 - n_y1 - n_y2),
        ("n_x1 + n_x2 + n_y1 - n_y2 != 0", n_x1 + n_x2 + n_y1 - n_y2),
        ("n_x1 + n_x2 - n_y1 + n_y2 != 0", n_x1 + n_x2 - n_y1 + n_y2),
    ]
    violated = [text for text, value in conditions if value == 0]
    return (not violated, violated)
