"""Collective-emission rate equations on the symmetric Dicke ladder.

The diagonal dynamics of N two-level emitters undergoing collective decay
(decay rate set to 1, times in units of the inverse rate) are a linear rate
equation p' = M p on the level populations, with emission rates
h_k = k(N - k + 1).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm

__all__ = [
    "PopulationVector",
    "RateMatrix",
    "Trajectory",
    "rate_coefficients",
    "rate_matrix",
    "evolve",
    "evolve_trajectory",
    "intensity",
    "intensity_from_decomposition",
    "dicke_populations",
]

NORMALIZATION_TOL = 1e-10


@dataclass(frozen=True)
class PopulationVector:
    """Probability vector over the N+1 Dicke levels k = 0..N."""

    N: int
    p: np.ndarray

    @classmethod
    def from_array(cls, p, tol_neg: float = 1e-12) -> "PopulationVector":
        """Validate, clamp round-off negatives, and wrap a raw array.

        Entries below ``-tol_neg`` are rejected; entries in ``[-tol_neg, 0)``
        are clamped to zero and the vector renormalized.
        """
        p = np.asarray(p, dtype=float)
        if p.ndim != 1 or p.size < 2:
            raise ValueError("population vector needs at least two levels")
        N = p.size - 1
        if not np.all(np.isfinite(p)):
            raise ValueError("non-finite population entries")
        if np.min(p) < -tol_neg:
            raise ValueError(
                f"population entry {np.min(p):.3e} below -tol_neg={-tol_neg:.1e}"
            )
        if abs(p.sum() - 1.0) > NORMALIZATION_TOL:
            raise ValueError(f"unnormalized population (sum={p.sum()!r})")
        p = np.clip(p, 0.0, None)
        p = p / p.sum()
        p.setflags(write=False)
        return cls(N=N, p=p)


@dataclass(frozen=True)
class RateMatrix:
    """Upper-bidiagonal generator of the rate equations (columns sum to 0)."""

    N: int
    entries: np.ndarray
    h: np.ndarray


@dataclass(frozen=True)
class Trajectory:
    """Populations sampled on a strictly increasing time grid."""

    times: np.ndarray
    states: tuple[PopulationVector, ...]


def rate_coefficients(N: int) -> np.ndarray:
    """Emission rates h_k = k(N - k + 1), exact in integers before conversion."""
    if N < 1:
        raise ValueError("invalid system size")
    h = [k * (N - k + 1) for k in range(N + 1)]
    return np.array(h, dtype=float)


def rate_matrix(N: int) -> RateMatrix:
    """Generator with diagonal (0, -h_1, ..., -h_N) and superdiagonal (h_1, ..., h_N)."""
    h = rate_coefficients(N)
    M = np.diag(-h) + np.diag(h[1:], k=1)
    M.setflags(write=False)
    h.setflags(write=False)
    return RateMatrix(N=N, entries=M, h=h)


def evolve(p0: PopulationVector, t: float) -> PopulationVector:
    """Propagate populations to time t via the matrix exponential exp(M t).

    Uses scaling-and-squaring (Pade); the generator has degenerate
    eigenvalues h_k = h_{N+1-k}, so eigendecomposition is not an option.
    """
    if t < 0:
        raise ValueError("negative time")
    if t == 0:
        return p0
    M = rate_matrix(p0.N).entries
    p = expm(M * t) @ p0.p
    return PopulationVector.from_array(p, tol_neg=1e-10)


def evolve_trajectory(p0: PopulationVector, times) -> Trajectory:
    """Propagate along a strictly increasing time grid (times[0] >= 0).

    Steps exp(M dt) between grid points; identical spacings reuse one
    propagator.
    """
    times = np.asarray(times, dtype=float)
    if times.ndim != 1 or times.size == 0:
        raise ValueError("empty time grid")
    if times[0] < 0 or np.any(np.diff(times) <= 0):
        raise ValueError("time grid must be nonnegative and strictly increasing")
    M = rate_matrix(p0.N).entries

    propagators: dict[float, np.ndarray] = {}

    def step(p, dt):
        key = round(dt, 15)
        if key not in propagators:
            propagators[key] = expm(M * dt)
        return propagators[key] @ p

    states = []
    p = p0.p
    prev = 0.0
    for t in times:
        if t > prev:
            p = step(p, t - prev)
            prev = t
        states.append(PopulationVector.from_array(p, tol_neg=1e-10))
    return Trajectory(times=times, states=tuple(states))


def intensity(p: PopulationVector) -> float:
    """Instantaneous radiated intensity sum_k h_k p_k (collective rate = 1)."""
    return float(rate_coefficients(p.N) @ p.p)


def intensity_from_decomposition(N: int, d) -> float:
    """Intensity of a spin-coherent mixture: sum_i w_i [N e_i + N(N-1) e_i(1-e_i)]."""
    d.validate()
    if d.N != N:
        raise ValueError("decomposition size mismatch")
    total = 0.0
    for w, eps in d.atoms:
        total += w * (N * eps + N * (N - 1) * eps * (1.0 - eps))
    return total


def dicke_populations(N: int, k: int) -> PopulationVector:
    """Population vector of the pure Dicke level k."""
    if not 0 <= k <= N:
        raise ValueError("Dicke level out of range")
    p = np.zeros(N + 1)
    p[k] = 1.0
    return PopulationVector.from_array(p)
