"""Truncated Hausdorff moment criterion on [0, 1] and a Hankel negativity measure.

A length-(N+1) sequence is a moment vector of a probability measure on
[0, 1] exactly when its Hankel matrix and the localizing (shifted) Hankel
matrix are positive semidefinite. For diagonal symmetric Dicke states this
decides separability; the summed magnitude of negative Hankel eigenvalues
quantifies the violation.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .bernstein import MomentVector, populations_to_moments
from .dicke_core import PopulationVector

__all__ = [
    "HankelPair",
    "SeparabilityVerdict",
    "build_hankel_pair",
    "validate_moments",
    "hankel_negativity",
    "DEFAULT_TOL_PSD",
]

DEFAULT_TOL_PSD = 1e-10


@dataclass(frozen=True)
class HankelPair:
    """Hankel matrix H and localizing matrix Hbar of a moment vector.

    H[k, k'] = m_{k+k'} has dimension floor(N/2)+1. The localizing matrix
    has dimension floor((N-1)/2)+1; for even N its entries are
    m_{k+k'+1} - m_{k+k'+2} (localizer x(1-x)), for odd N they are
    m_{k+k'} - m_{k+k'+1} (localizer 1-x), so the largest moment index
    used is always N. Odd N additionally requires the plain shifted matrix
    (m_{k+k'+1}) (localizer x), stored in ``Hshift``.
    """

    N: int
    H: np.ndarray
    Hbar: np.ndarray
    Hshift: Optional[np.ndarray]


@dataclass(frozen=True)
class SeparabilityVerdict:
    valid: bool
    boundary: bool
    min_eig_H: float
    min_eig_Hbar: float
    violating_minor: Optional[tuple[str, int]]


def build_hankel_pair(m: MomentVector) -> HankelPair:
    """Assemble the Hankel/localizing pair; every index used is at most N."""
    N = m.N
    if N < 1:
        raise ValueError("need at least two moments")
    v = m.m
    nH = N // 2 + 1
    H = np.array([[v[i + j] for j in range(nH)] for i in range(nH)])
    nB = (N - 1) // 2 + 1
    if N % 2 == 0:
        Hbar = np.array(
            [[v[i + j + 1] - v[i + j + 2] for j in range(nB)] for i in range(nB)]
        )
        Hshift = None
    else:
        Hbar = np.array(
            [[v[i + j] - v[i + j + 1] for j in range(nB)] for i in range(nB)]
        )
        Hshift = np.array([[v[i + j + 1] for j in range(nB)] for i in range(nB)])
        Hshift.setflags(write=False)
    H.setflags(write=False)
    Hbar.setflags(write=False)
    return HankelPair(N=N, H=H, Hbar=Hbar, Hshift=Hshift)


def _psd_scale(pair: HankelPair) -> float:
    norms = [np.linalg.norm(pair.H, 2), np.linalg.norm(pair.Hbar, 2)]
    if pair.Hshift is not None:
        norms.append(np.linalg.norm(pair.Hshift, 2))
    return 1.0 + max(norms)


def _first_negative_minor(pair: HankelPair, tol: float) -> Optional[tuple[str, int]]:
    # Diagnostic only: leading minors underflow like delta^{r(r-1)/2} near
    # the moment-cone boundary, so signs are unreliable for large orders.
    matrices = [("H", pair.H), ("Hbar", pair.Hbar)]
    if pair.Hshift is not None:
        matrices.append(("Hshift", pair.Hshift))
    for tag, A in matrices:
        for r in range(1, A.shape[0] + 1):
            if np.linalg.det(A[:r, :r]) < -tol:
                return (tag, r)
    return None


def validate_moments(
    m: MomentVector, tol_psd: float = DEFAULT_TOL_PSD
) -> SeparabilityVerdict:
    """Decide moment-vector validity from the smallest Hankel eigenvalues.

    Validity means there is a probability measure on [0, 1] with these
    moments; for moments of a Dicke population vector this is separability.
    Smallest eigenvalues within the scaled tolerance band of zero count as
    valid with the boundary flag set (the superradiant trajectory rides the
    boundary of the moment cone).
    """
    if abs(m.m[0] - 1.0) > 1e-10:
        raise ValueError("moments not normalized")
    pair = build_hankel_pair(m)
    scale = _psd_scale(pair)
    eig_H = float(np.linalg.eigvalsh(pair.H)[0])
    eig_Hbar = float(np.linalg.eigvalsh(pair.Hbar)[0])
    if pair.Hshift is not None:
        eig_Hbar = min(eig_Hbar, float(np.linalg.eigvalsh(pair.Hshift)[0]))
    smallest = min(eig_H, eig_Hbar)
    valid = bool(smallest >= -tol_psd * scale)
    boundary = bool(valid and smallest <= tol_psd * scale)
    violating = None
    if not valid:
        violating = _first_negative_minor(pair, tol_psd * scale)
    return SeparabilityVerdict(
        valid=valid,
        boundary=boundary,
        min_eig_H=eig_H,
        min_eig_Hbar=eig_Hbar,
        violating_minor=violating,
    )


def hankel_negativity(
    p: PopulationVector, tol_psd: float = DEFAULT_TOL_PSD
) -> float:
    """Summed magnitude of negative Hankel eigenvalues of m = B p.

    Zero exactly when the (diagonal symmetric) state is separable;
    eigenvalues above the scaled round-off threshold are treated as zero.
    """
    pair = build_hankel_pair(populations_to_moments(p))
    threshold = -tol_psd * _psd_scale(pair)
    matrices = [pair.H, pair.Hbar]
    if pair.Hshift is not None:
        matrices.append(pair.Hshift)
    total = 0.0
    for A in matrices:
        eigs = np.linalg.eigvalsh(A)
        total += float(-eigs[eigs < threshold].sum())
    return total
