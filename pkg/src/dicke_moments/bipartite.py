"""Bipartite entanglement measures for diagonal symmetric Dicke mixtures.

Two-spin reduced states have a closed form in the populations; larger
reductions follow from iterating a single-particle-loss map, cross-checked
against the hypergeometric marginal. Negativities are evaluated in the
symmetric-block basis, never the exponential product basis.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .dicke_core import PopulationVector
from .hausdorff import DEFAULT_TOL_PSD

__all__ = [
    "TwoSpinState",
    "ReducedDickeMixture",
    "two_spin_coefficients",
    "two_spin_state",
    "two_spin_negativity",
    "delta_witness",
    "reduced_dicke_mixture",
    "hypergeometric_marginal",
    "bipartition_negativity",
]


@dataclass(frozen=True)
class TwoSpinState:
    """Coefficients (A, B, D) of the 4x4 two-emitter reduced matrix.

    A is the both-ground weight, B the cross term, D the both-excited
    weight; A + 2B + D = 1.
    """

    A: float
    B: float
    D: float

    def validate(self) -> None:
        if min(self.A, self.B, self.D) < -1e-12:
            raise ValueError("negative two-spin coefficient")
        if abs(self.A + 2 * self.B + self.D - 1.0) > 1e-10:
            raise ValueError("two-spin coefficients not normalized")


@dataclass(frozen=True)
class ReducedDickeMixture:
    """Diagonal Dicke mixture on n retained spins after tracing out N - n."""

    n: int
    q: np.ndarray


def two_spin_coefficients(N: int, k: int) -> tuple[float, float, float]:
    """Exact (a_k, b_k, d_k) of the Dicke-level-k two-emitter reduction.

    a_k = (N-k)(N-k-1)/(N(N-1)), b_k = k(N-k)/(N(N-1)),
    d_k = k(k-1)/(N(N-1)); a + 2b + d = 1 exactly.
    """
    if N < 2:
        raise ValueError("need at least two emitters")
    if not 0 <= k <= N:
        raise ValueError("Dicke level out of range")
    denom = N * (N - 1)
    a = Fraction((N - k) * (N - k - 1), denom)
    b = Fraction(k * (N - k), denom)
    d = Fraction(k * (k - 1), denom)
    assert a + 2 * b + d == 1
    return float(a), float(b), float(d)


def two_spin_state(p: PopulationVector) -> TwoSpinState:
    """Mixture coefficients (A, B, D) = sum_k p_k (a_k, b_k, d_k)."""
    if p.N < 2:
        raise ValueError("need at least two emitters")
    A = B = D = 0.0
    for k, pk in enumerate(p.p):
        a, b, d = two_spin_coefficients(p.N, k)
        A += pk * a
        B += pk * b
        D += pk * d
    return TwoSpinState(A=A, B=B, D=D)


def two_spin_negativity(s: TwoSpinState) -> float:
    """Negativity of the partially transposed two-spin state.

    Only one eigenvalue can go negative, giving the closed form
    max{0, (sqrt((A-D)^2 + 4B^2) - (A+D)) / 2}.
    """
    s.validate()
    lam = 0.5 * (math.sqrt((s.A - s.D) ** 2 + 4 * s.B**2) - (s.A + s.D))
    return max(0.0, lam)


def delta_witness(s: TwoSpinState) -> float:
    """AD - B^2; strictly negative exactly when the two-spin state is entangled."""
    s.validate()
    return s.A * s.D - s.B**2


def _loss_step(q: np.ndarray) -> np.ndarray:
    """Trace out one spin of an n-spin diagonal Dicke mixture.

    In the fully symmetric sector the particle-loss superoperator reduces
    to q'_j = ((n - j)/n) q_j + ((j + 1)/n) q_{j+1}.
    """
    n = q.size - 1
    j = np.arange(n)
    return (n - j) / n * q[:-1] + (j + 1) / n * q[1:]


def hypergeometric_marginal(p: PopulationVector, n: int) -> np.ndarray:
    """Closed-form n-spin marginal q_j = sum_k p_k C(n,j) C(N-n,k-j) / C(N,k)."""
    N = p.N
    q = np.zeros(n + 1)
    for j in range(n + 1):
        total = 0.0
        for k in range(N + 1):
            if 0 <= k - j <= N - n:
                total += p.p[k] * math.comb(n, j) * math.comb(N - n, k - j) / math.comb(N, k)
        q[j] = total
    return q


def reduced_dicke_mixture(p: PopulationVector, n: int) -> ReducedDickeMixture:
    """Reduce to n spins by iterating the particle-loss map N - n times.

    The recursion result is checked against the hypergeometric marginal on
    every call; the loss-map matrix elements come from the literature and
    the internal oracle guards against transcription error.
    """
    if not 1 <= n <= p.N:
        raise ValueError("retained spin count out of range")
    q = p.p.copy()
    for _ in range(p.N - n):
        q = _loss_step(q)
    oracle = hypergeometric_marginal(p, n)
    if np.max(np.abs(q - oracle)) > 1e-10:
        raise AssertionError("particle-loss recursion disagrees with marginal")
    q = np.clip(q, 0.0, None)
    q = q / q.sum()
    q.setflags(write=False)
    return ReducedDickeMixture(n=n, q=q)


def bipartition_negativity(
    q: ReducedDickeMixture, n1: int, tol_psd: float = DEFAULT_TOL_PSD
) -> float:
    """Negativity of the n-spin mixture across the (n1, n - n1) bipartition.

    Each Dicke level j expands over the split as
    |D^n_j> = sum_s sqrt(C(n1,s) C(n2,j-s) / C(n,j)) |D^{n1}_s>|D^{n2}_{j-s}>,
    so the state lives in the (n1+1)(n2+1)-dimensional symmetric-block
    basis. The second factor is partially transposed there and the negative
    eigenvalues summed.
    """
    n = q.n
    if not 1 <= n1 < n:
        raise ValueError("bipartition size out of range")
    if n > 64:
        raise ValueError("bipartition too large")
    n2 = n - n1
    dim = (n1 + 1) * (n2 + 1)
    rho = np.zeros((dim, dim))
    for j, qj in enumerate(q.q):
        if qj == 0.0:
            continue
        coeffs = np.zeros(dim)
        for s in range(max(0, j - n2), min(n1, j) + 1):
            c = math.comb(n1, s) * math.comb(n2, j - s) / math.comb(n, j)
            coeffs[s * (n2 + 1) + (j - s)] = math.sqrt(c)
        rho += qj * np.outer(coeffs, coeffs)
    rho4 = rho.reshape(n1 + 1, n2 + 1, n1 + 1, n2 + 1)
    rho_pt = rho4.transpose(0, 3, 2, 1).reshape(dim, dim)
    eigs = np.linalg.eigvalsh(rho_pt)
    scale = 1.0 + float(np.max(np.abs(eigs)))
    threshold = -tol_psd * scale
    return float(-eigs[eigs < threshold].sum())
