"""Bernstein/monomial transforms between Dicke populations and raw moments.

The triangular matrix B with entries C(k', k)/C(N, k) maps the Bernstein
basis onto the monomials, so m = B p turns level populations into candidate
moments of a distribution of the excitation probability on [0, 1].
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.stats import binom as binom_dist

from .dicke_core import PopulationVector, rate_coefficients

__all__ = [
    "MomentVector",
    "TransformMatrix",
    "MomentGenerator",
    "transform_matrix",
    "populations_to_moments",
    "moments_to_populations",
    "moment_generator",
    "coherent_populations",
    "phase_averaged_product_density",
]

# Bernstein-to-monomial conversion is notoriously ill-conditioned; warn
# downstream users past this estimated condition number.
CONDITION_LIMIT = 1e12


@dataclass(frozen=True)
class MomentVector:
    """Candidate raw moments m_0..m_N of a measure on [0, 1] (m_0 = 1)."""

    N: int
    m: np.ndarray

    @classmethod
    def from_array(cls, m) -> "MomentVector":
        m = np.asarray(m, dtype=float)
        if m.ndim != 1 or m.size < 2:
            raise ValueError("need at least two moments")
        if not np.all(np.isfinite(m)):
            raise ValueError("non-finite moment entries")
        if abs(m[0] - 1.0) > 1e-10:
            raise ValueError(f"moments not normalized (m_0={m[0]!r})")
        m = m.copy()
        m.setflags(write=False)
        return cls(N=m.size - 1, m=m)

    def assert_monotone(self, tol: float = 1e-12) -> None:
        """Moments of a measure on [0,1] are nonincreasing in the order."""
        if np.any(np.diff(self.m) > tol):
            raise ValueError("moment sequence increases beyond tolerance")


@dataclass(frozen=True)
class TransformMatrix:
    """Upper triangular B and its cached inverse."""

    N: int
    B: np.ndarray
    Binv: np.ndarray
    ill_conditioned: bool


@dataclass(frozen=True)
class MomentGenerator:
    """Upper-bidiagonal generator of the moment dynamics m' = Mbar m."""

    N: int
    Mbar: np.ndarray
    beta: np.ndarray
    lam: np.ndarray


def transform_matrix(N: int) -> TransformMatrix:
    """Build B[k, k'] = C(k', k)/C(N, k) and its inverse from exact rationals.

    Entries and the back-substituted inverse are assembled in Fraction
    arithmetic and rounded once; float binomials lose the positive
    semidefiniteness of downstream Hankel matrices already for moderate N.
    """
    if N < 1:
        raise ValueError("invalid system size")
    B_exact = [
        [Fraction(math.comb(kp, k), math.comb(N, k)) for kp in range(N + 1)]
        for k in range(N + 1)
    ]
    # Back-substitution on the unit-free triangular structure, all exact.
    Binv_exact = [[Fraction(0)] * (N + 1) for _ in range(N + 1)]
    for col in range(N + 1):
        for row in range(col, -1, -1):
            if row == col:
                Binv_exact[row][col] = 1 / B_exact[row][row]
            else:
                s = sum(
                    B_exact[row][j] * Binv_exact[j][col]
                    for j in range(row + 1, col + 1)
                )
                Binv_exact[row][col] = -s / B_exact[row][row]
    B = np.array([[float(x) for x in row] for row in B_exact])
    Binv = np.array([[float(x) for x in row] for row in Binv_exact])
    cond = float(np.linalg.cond(B))
    ill = cond > CONDITION_LIMIT
    if ill:
        warnings.warn(
            f"Bernstein transform for N={N} has condition number {cond:.2e}; "
            "moment-space results may lose accuracy",
            RuntimeWarning,
            stacklevel=2,
        )
    B.setflags(write=False)
    Binv.setflags(write=False)
    return TransformMatrix(N=N, B=B, Binv=Binv, ill_conditioned=ill)


def populations_to_moments(p: PopulationVector) -> MomentVector:
    """Moment vector m = B p of a population vector."""
    if abs(p.p.sum() - 1.0) > 1e-8:
        raise ValueError("unnormalized population")
    tm = transform_matrix(p.N)
    m = tm.B @ p.p
    m[0] = 1.0
    return MomentVector.from_array(m)


def moments_to_populations(m: MomentVector) -> PopulationVector:
    """Inverse transform p = B^{-1} m; rejects vectors far outside the simplex."""
    tm = transform_matrix(m.N)
    p = tm.Binv @ m.m
    if np.min(p) < -1e-6:
        raise ValueError("moment vector outside Bernstein simplex")
    p = np.clip(p, 0.0, None)
    p = p / p.sum()
    return PopulationVector.from_array(p)


def moment_generator(N: int) -> MomentGenerator:
    """Moment-space generator: diagonal -beta_k, superdiagonal lambda_k.

    beta_k = k(N - k + 1) coincides with the emission rates; lambda_k =
    k(N - k) terminates the bidiagonal at the top level. Satisfies the
    conjugation B M = Mbar B with the population generator M.
    """
    if N < 1:
        raise ValueError("invalid system size")
    beta = rate_coefficients(N)
    lam = np.array([k * (N - k) for k in range(N + 1)], dtype=float)
    Mbar = np.diag(-beta) + np.diag(lam[:-1], k=1)
    Mbar.setflags(write=False)
    beta.setflags(write=False)
    lam.setflags(write=False)
    return MomentGenerator(N=N, Mbar=Mbar, beta=beta, lam=lam)


def coherent_populations(N: int, eps: float) -> PopulationVector:
    """Binomial level populations of a phase-averaged spin coherent state.

    p_k = C(N, k) eps^k (1-eps)^(N-k): the Bernstein basis evaluated at eps.
    """
    if N < 1:
        raise ValueError("invalid system size")
    if not -1e-12 <= eps <= 1 + 1e-12:
        raise ValueError("excitation probability outside [0, 1]")
    eps = min(max(eps, 0.0), 1.0)
    k = np.arange(N + 1)
    if N <= 50:
        p = np.array(
            [math.comb(N, int(j)) * eps**j * (1 - eps) ** (N - j) for j in k]
        )
    else:
        # log-space evaluation avoids binomial overflow at large N
        p = binom_dist.pmf(k, N, eps)
    return PopulationVector.from_array(p / p.sum())


def phase_averaged_product_density(N: int, eps: float) -> np.ndarray:
    """Average the product state over N+1 discrete phases in the Dicke basis.

    Returns the (N+1)x(N+1) density matrix of rho(eps, phi)^{tensor N}
    averaged over phi_j = 2 pi j / (N+1). Matrix elements between levels k
    and k' carry a phase factor exp(i phi (k - k')) with |k - k'| <= N, so
    N+1 equally spaced phases cancel every off-diagonal element exactly
    (N phases would leave the k - k' = +-N corner untouched).
    """
    if N < 1:
        raise ValueError("invalid system size")
    if not -1e-12 <= eps <= 1 + 1e-12:
        raise ValueError("excitation probability outside [0, 1]")
    eps = min(max(eps, 0.0), 1.0)
    phases = 2.0 * np.pi * np.arange(N + 1) / (N + 1)
    rho = np.zeros((N + 1, N + 1), dtype=complex)
    for phi in phases:
        rho += product_density(N, eps, phi)
    return rho / (N + 1)


def product_density(N: int, eps: float, phi: float) -> np.ndarray:
    """Density matrix of the pure product state with fixed phase phi."""
    k = np.arange(N + 1)
    amp = np.sqrt([math.comb(N, int(j)) for j in k])
    amp = amp * np.exp(1j * phi * k) * eps ** (k / 2.0) * (1 - eps) ** ((N - k) / 2.0)
    return np.outer(amp, amp.conj())
