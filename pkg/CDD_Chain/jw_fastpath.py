# CDD Chain Simulator - Jordan-Wigner fast path
# Copyright (C) 2025-2026 CDD Chain contributors
#
# SPDX-License-Identifier: GPL-3.0-or-later
# See LICENSE file for full license text.

"""
Polynomial-cost dynamics of the effective chain when 2 lambda_1 + lambda_2 + lambda_3 = 0.

Under that constraint the effective Hamiltonians carry no sigma_z sigma_z residue:

    hbar1 = -lambda_1 sum YY
    hbar2 = -lambda_1 sum YY + ((lambda_1 + lambda_2) / 2) sum (XY + YX)

With c_i = prod_{j<i} (-sz_j) a_i and a = |1><0|, both read

    H = lambda_1 [c^dag J c + (1/2)(e^{-i phi} c^dag K c^dag + h.c.)] + const

with J = -1 on both off-diagonals, K = +gamma above and -gamma below the diagonal,
gamma = sqrt(lambda_1^2 + (lambda_1 + lambda_2)^2) / |lambda_1| and
phi = arctan((lambda_1 + lambda_2) / lambda_1) (gamma = 1, phi = 0 for hbar1).
|11...1> is the fermionic vacuum.

Steps:
1. `build_quadratic_form`: J, K, gamma, phi.
2. `solve_free_fermion`: Phi (J - K) = s Psi via the singular value decomposition of J - K;
   zero modes are the null-space vectors of the same decomposition. Bogoliubov modes
   eta_k = sum_i g_ki c_i + h_ki c_i^dag with g = (Phi + Psi) / 2,
   h = e^{-i phi} (Phi - Psi) / 2 and energies Lambda_k = |lambda_1| s_k.
3. `correlators_at`: A(t), B(t), X = A + B^*, Y = B^* - A and the blocks
   T = <PP> = X X^dag, S = <QQ> = -Y Y^dag, F = <QP> = Y X^dag, W = <PQ> = -X Y^dag
   (P = c^dag + c, Q = c^dag - c). Spin correlators follow from Wick's theorem as Pfaffians
   of the Majorana two-point matrix.
4. `two_spin_density_jw`: rho = (1/4) sum Theta_ab sa x sb over the non-vanishing set.
5. `jw_concurrence_curve`: the full pipeline on a time grid.

Dependencies:
- pfapack (Parlett-Reid Pfaffian with pivoting)
"""

# Built-in modules
import logging
import math
from dataclasses import dataclass, field

# External modules
import numpy as np
from pfapack.pfaffian import pfaffian as pfapack_pfaffian
from scipy import linalg

# Local imports
from .errors import ConstraintViolation, NumericalFailure
from .hilbert_core import IDENTITY2, PAULI, TwoSpinDensity
from .observables import ObservableSeries, concurrence, purity

ANTISYMMETRY_TOL = 1e-10
CANONICAL_TOL = 1e-10
EXPANSION_MAX_DIM = 8
JW_DENSITY_TOL = 1e-8
JW_VARIANTS = ("hbar1", "hbar2")
CORRELATOR_KEYS = ("xx", "xy", "yx", "yy", "zz")


@dataclass(frozen=True)
class QuadraticForm:
    J: np.ndarray
    K: np.ndarray
    gamma: float
    phi: float
    lambda1: float
    variant: str = "hbar2"

    @property
    def n_sites(self) -> int:
        return self.J.shape[0]


@dataclass(frozen=True)
class FreeFermionSolution:
    """
    Bogoliubov transformation of a quadratic form.

    Lambda: nonnegative mode energies; g, h: eta = g c + h c^dag;
    g_inv, h_inv: c = g_inv eta + h_inv eta^dag (g_inv = g^dag, h_inv = h^T);
    Phi, Psi: real orthogonal auxiliary matrices (rows are modes).
    """

    Lambda: np.ndarray
    g: np.ndarray
    h: np.ndarray
    g_inv: np.ndarray
    h_inv: np.ndarray
    Phi: np.ndarray
    Psi: np.ndarray
    form: QuadraticForm

    @property
    def n_sites(self) -> int:
        return self.Lambda.size

    def canonical_residuals(self) -> tuple:
        """(|g g^dag + h h^dag - I|, |g h^T + h g^T|), max-abs norms."""
        g, h = self.g, self.h
        first = np.max(np.abs(g @ g.conj().T + h @ h.conj().T - np.eye(self.n_sites)))
        second = np.max(np.abs(g @ h.T + h @ g.T))
        return float(first), float(second)


@dataclass(frozen=True)
class CorrelatorSet:
    """
    Two-point blocks and spin correlators at one time.

    theta maps an ordered site pair (l, m) to {"xx", "xy", "yx", "yy", "zz"}, each
    <s_a^(l) s_b^(m)>; sigma_z[l - 1] = <sz^(l)>.
    """

    t: float
    A: np.ndarray
    B: np.ndarray
    X: np.ndarray
    Y: np.ndarray
    F: np.ndarray
    S: np.ndarray
    T: np.ndarray
    W: np.ndarray
    sigma_z: np.ndarray
    theta: dict = field(default_factory=dict)


def build_quadratic_form(lambda1: float, lambda2: float, N: int, variant: str = "hbar2") -> QuadraticForm:
    """
    Fermionic quadratic form of hbar1 or hbar2 for lambda_3 = -2 lambda_1 - lambda_2.

    Raises:
        ConstraintViolation: lambda_1 = 0, N < 2 or an unknown variant.
    """
    if lambda1 == 0:
        logging.error("Jordan-Wigner form needs lambda_1 != 0")
        raise ConstraintViolation("The Jordan-Wigner form needs lambda_1 != 0")
    if N < 2:
        raise ConstraintViolation(f"A chain needs N >= 2, got {N}")
    if variant not in JW_VARIANTS:
        raise ConstraintViolation(f"Jordan-Wigner path supports {JW_VARIANTS}, got '{variant}'")
    if variant == "hbar1":
        gamma, phi = 1.0, 0.0
    else:
        ratio = (lambda1 + lambda2) / lambda1
        gamma = math.sqrt(lambda1**2 + (lambda1 + lambda2) ** 2) / abs(lambda1)
        phi = math.atan(ratio)
    off = np.ones(N - 1)
    J = -np.diag(off, 1) - np.diag(off, -1)
    K = gamma * (np.diag(off, 1) - np.diag(off, -1))
    return QuadraticForm(J, K, gamma, phi, float(lambda1), variant)


def _fix_signs(Phi: np.ndarray, Psi: np.ndarray, s: np.ndarray) -> None:
    """Make the first significant component of each Phi row positive (Psi follows for s > 0)."""
    tol = 1e-12
    for k in range(Phi.shape[0]):
        lead = Phi[k][np.abs(Phi[k]) > tol]
        if lead.size and lead[0] < 0:
            Phi[k] *= -1.0
            if s[k] > tol:
                Psi[k] *= -1.0
        if s[k] <= tol:
            lead = Psi[k][np.abs(Psi[k]) > tol]
            if lead.size and lead[0] < 0:
                Psi[k] *= -1.0


def solve_free_fermion(q: QuadraticForm) -> FreeFermionSolution:
    """
    Diagonalize the quadratic form.

    Returns:
        FreeFermionSolution: with all Lambda_k >= 0.

    Raises:
        NumericalFailure: if the decomposition fails or the result is not canonical.
    """
    M = q.J - q.K
    try:
        U, s, Vh = linalg.svd(M)
    except linalg.LinAlgError as e:
        logging.error(f"SVD of J - K failed: {e}")
        raise NumericalFailure(f"SVD of J - K failed: {e}") from e
    Phi = U.T.copy()
    Psi = Vh.copy()
    _fix_signs(Phi, Psi, s)

    g = (Phi + Psi) / 2.0
    h = np.exp(-1j * q.phi) * (Phi - Psi) / 2.0
    if q.lambda1 < 0:
        # negative mode energies: eta_k <-> eta_k^dag
        g, h = h.conj(), g.conj()
    Lambda = abs(q.lambda1) * s
    solution = FreeFermionSolution(Lambda, g, h, g.conj().T, h.T, Phi, Psi, q)

    residuals = solution.canonical_residuals()
    if max(residuals) > CANONICAL_TOL:
        logging.error(f"Bogoliubov transformation not canonical: {residuals}")
        raise NumericalFailure(f"Bogoliubov transformation is not canonical: {residuals}")
    logging.debug(f"Free-fermion spectrum: {np.array2string(Lambda, precision=6)}")
    return solution


def many_body_spectrum(solution: FreeFermionSolution) -> np.ndarray:
    """Sorted levels sum_k Lambda_k n_k + const with const = -sum Lambda / 2 (traceless)."""
    if solution.n_sites > 20:
        raise ConstraintViolation("Many-body spectrum enumeration is limited to N <= 20")
    levels = np.zeros(1)
    for energy in solution.Lambda:
        levels = np.concatenate([levels, levels + energy])
    return np.sort(levels - solution.Lambda.sum() / 2.0)


def _check_antisymmetric(M: np.ndarray) -> None:
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ConstraintViolation(f"Pfaffian needs a square matrix, got shape {M.shape}")
    if M.shape[0] % 2:
        raise ConstraintViolation(f"Pfaffian needs an even dimension, got {M.shape[0]}")
    scale = max(1.0, float(np.max(np.abs(M), initial=0.0)))
    if np.max(np.abs(M + M.T), initial=0.0) > ANTISYMMETRY_TOL * scale:
        logging.error("Pfaffian input is not antisymmetric")
        raise ConstraintViolation("Pfaffian input is not antisymmetric within 1e-10")


def pfaffian_expansion(M: np.ndarray) -> complex:
    """
    Pf(M) = sum_{j>0} (-1)^(j+1) M[0, j] Pf(M without rows/columns 0 and j).

    Exponential cost; used to cross-check small matrices.
    """
    M = np.asarray(M)
    _check_antisymmetric(M)
    n = M.shape[0]
    if n == 0:
        return 1.0
    if n > 2 * EXPANSION_MAX_DIM:
        raise ConstraintViolation(f"Cofactor expansion is limited to dimension {2 * EXPANSION_MAX_DIM}")
    total = 0.0
    for j in range(1, n):
        if M[0, j] == 0:
            continue
        rest = [k for k in range(1, n) if k != j]
        sign = 1.0 if j % 2 == 1 else -1.0
        total += sign * M[0, j] * pfaffian_expansion(M[np.ix_(rest, rest)])
    return total


def pfaffian(M: np.ndarray, cross_check: bool = True) -> complex:
    """
    Pfaffian of an even-dimensional antisymmetric matrix.

    Parlett-Reid tridiagonalization with pivoting; dimensions up to 8 are cross-checked
    against the cofactor expansion.

    Raises:
        ConstraintViolation: odd dimension or antisymmetry violated beyond 1e-10.
        NumericalFailure: the two evaluations disagree.
    """
    M = np.asarray(M)
    _check_antisymmetric(M)
    if M.shape[0] == 0:
        return 1.0
    antisymmetric = (M - M.T) / 2.0
    value = pfapack_pfaffian(antisymmetric.astype(complex), method="P")
    if cross_check and M.shape[0] <= EXPANSION_MAX_DIM:
        reference = pfaffian_expansion(antisymmetric)
        scale = max(1.0, abs(reference))
        if abs(value - reference) > 1e-10 * scale:
            logging.error(f"Pfaffian cross-check failed: {value} vs {reference}")
            raise NumericalFailure(f"Pfaffian cross-check failed: {value} vs {reference}")
    return value


def _evolution_matrices(sol: FreeFermionSolution, t: float) -> tuple:
    forward = np.exp(-1j * sol.Lambda * t)
    backward = np.exp(1j * sol.Lambda * t)
    g_t = sol.g_inv * forward
    h_t = sol.h_inv * backward
    A = g_t @ sol.g + h_t @ sol.h.conj()
    B = g_t @ sol.h + h_t @ sol.g.conj()
    return A, B


def majorana_two_point(T: np.ndarray, S: np.ndarray, F: np.ndarray, W: np.ndarray) -> np.ndarray:
    """
    <m_a m_b> for m_{2l-1} = S_l sx_l, m_{2l} = S_l sy_l (S_l = prod_{j<l} sz_j).

    Uses P_l = (-1)^(l-1) m_{2l-1} and Q_l = i (-1)^(l-1) m_{2l}. Zero-based rows 2l and
    2l + 1 hold the two Majoranas of site l + 1.
    """
    N = T.shape[0]
    signs = (-1.0) ** np.arange(N)
    ss = np.outer(signs, signs)
    G = np.empty((2 * N, 2 * N), dtype=complex)
    G[0::2, 0::2] = ss * T
    G[0::2, 1::2] = -1j * ss * W
    G[1::2, 0::2] = -1j * ss * F
    G[1::2, 1::2] = -ss * S
    return G


def _wick(G: np.ndarray, indices: list) -> complex:
    """<m_{a_1} ... m_{a_2n}> for distinct zero-based Majorana indices."""
    sub = np.triu(G[np.ix_(indices, indices)], 1)
    return pfaffian(sub - sub.T)


def _pair_correlators(G: np.ndarray, l: int, m: int) -> dict:
    """Theta_ab for 1-based sites l < m."""
    # 1-based Majorana k sits at zero-based index k - 1
    def idx(*ks):
        return [k - 1 for k in ks]

    string = list(range(2 * l + 1, 2 * m - 1))
    phase = (-1j) ** (m - l)
    return {
        "xx": (phase * _wick(G, idx(2 * l, *string, 2 * m - 1))).real,
        "xy": (phase * _wick(G, idx(2 * l, *string, 2 * m))).real,
        "yx": (-phase * _wick(G, idx(2 * l - 1, *string, 2 * m - 1))).real,
        "yy": (-phase * _wick(G, idx(2 * l - 1, *string, 2 * m))).real,
        "zz": (-_wick(G, idx(2 * l - 1, 2 * l, 2 * m - 1, 2 * m))).real,
    }


def correlators_at(sol: FreeFermionSolution, t: float, pairs) -> CorrelatorSet:
    """
    Correlators at time t for the initial state |11...1>.

    Parameters:
        sol (FreeFermionSolution): diagonalized form.
        t (float): time.
        pairs (list[tuple[int, int]]): 1-based distinct site pairs; the first site is the
            left factor.

    Raises:
        ConstraintViolation: pair indices out of range.
        NumericalFailure: T - I or S + I not antisymmetric within 1e-10.
    """
    N = sol.n_sites
    for l, m in pairs:
        if not (1 <= l <= N and 1 <= m <= N) or l == m:
            raise ConstraintViolation(f"Site pair ({l}, {m}) invalid for N={N}")
    A, B = _evolution_matrices(sol, t)
    X = A + B.conj()
    Y = B.conj() - A
    T = X @ X.conj().T
    S = -(Y @ Y.conj().T)
    F = Y @ X.conj().T
    W = -(X @ Y.conj().T)

    eye = np.eye(N)
    for name, off_diagonal in (("T", T - eye), ("S", S + eye)):
        residual = np.max(np.abs(off_diagonal + off_diagonal.T))
        if residual > ANTISYMMETRY_TOL:
            logging.error(f"Block {name} off-diagonal part not antisymmetric ({residual:.3e})")
            raise NumericalFailure(f"Block {name} is not antisymmetric off the diagonal ({residual:.3e})")

    G = majorana_two_point(T, S, F, W)
    theta = {}
    for l, m in pairs:
        if l < m:
            theta[(l, m)] = _pair_correlators(G, l, m)
        else:
            swapped = _pair_correlators(G, m, l)
            theta[(l, m)] = {key: swapped[key[::-1]] for key in CORRELATOR_KEYS}
    sigma_z = -np.real(np.diag(W))
    return CorrelatorSet(t, A, B, X, Y, F, S, T, W, sigma_z, theta)


def two_spin_density_jw(cs: CorrelatorSet, pair) -> TwoSpinDensity:
    """
    (1/4)[I x I + <sz_l> sz x I + <sz_m> I x sz + sum Theta_ab sa x sb] for (l, m).

    Raises:
        ConstraintViolation: the pair was not evaluated in `cs`.
    """
    l, m = (int(s) for s in pair)
    if (l, m) not in cs.theta:
        raise ConstraintViolation(f"Correlators for pair ({l}, {m}) were not evaluated")
    theta = cs.theta[(l, m)]
    rho = np.kron(IDENTITY2, IDENTITY2).astype(complex)
    rho += cs.sigma_z[l - 1] * np.kron(PAULI["z"], IDENTITY2)
    rho += cs.sigma_z[m - 1] * np.kron(IDENTITY2, PAULI["z"])
    for key, value in theta.items():
        rho += value * np.kron(PAULI[key[0]], PAULI[key[1]])
    return TwoSpinDensity(rho / 4.0, (l, m))


def jw_pair_series(lambda1: float, lambda2: float, N: int, variant: str, pair, time_grid) -> dict:
    """
    Concurrence, rescaled concurrence and purity of one pair along a time grid.

    Returns:
        dict[str, ObservableSeries]: keys "concurrence", "rescaled_concurrence", "purity".
    """
    times = np.asarray(time_grid, dtype=float)
    solution = solve_free_fermion(build_quadratic_form(lambda1, lambda2, N, variant))
    pair = tuple(int(s) for s in pair)
    values = {"concurrence": [], "purity": []}
    for t in times:
        rho = two_spin_density_jw(correlators_at(solution, float(t), [pair]), pair)
        problems = rho.violations(JW_DENSITY_TOL)
        if problems:
            logging.error(f"JW density at t={t:.4f} invalid: {problems}")
            raise NumericalFailure(f"Jordan-Wigner density at t={t:.4f} is invalid: {problems}")
        values["concurrence"].append(concurrence(rho, JW_DENSITY_TOL))
        values["purity"].append(purity(rho))
    label = f"jw {variant} C{pair}"
    C = ObservableSeries(times, values["concurrence"], label)
    return {
        "concurrence": C,
        "rescaled_concurrence": ObservableSeries(times, (N - 1) * C.values, f"{label} rescaled", bounded=False),
        "purity": ObservableSeries(times, values["purity"], f"jw {variant} P{pair}"),
    }


def jw_concurrence_curve(lambda1: float, lambda2: float, N: int, variant: str, pair, time_grid) -> ObservableSeries:
    """End-to-end concurrence of `pair` from the initial state |11...1>."""
    return jw_pair_series(lambda1, lambda2, N, variant, pair, time_grid)["concurrence"]
