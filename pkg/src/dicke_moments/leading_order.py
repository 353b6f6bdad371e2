"""Extended-precision verification of leading Hankel-minor expansions.

For moments evolved a short step delta from a point mass at x, the r-th
Hankel minor opens as K_r (1-x)^{r(r-1)/2} x^{r(r-1)} delta^{r(r-1)/2},
with K_r = 2^{r(r-1)/2} prod_{k<r} k! independent of N and x; the shifted
minor carries an extra x(1-x) per row. These determinants sit far below
double precision (delta^10 for r = 5), so everything here runs in mpmath.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import mpmath as mp

from .bernstein import moment_generator

__all__ = [
    "PrecisionContext",
    "LeadingOrderReport",
    "kr_closed_form",
    "linearized_minor_check",
    "leading_coefficient_extract",
]


def _default_ladder() -> tuple[float, ...]:
    return tuple(2.0 ** (-6 - j) for j in range(8))


@dataclass(frozen=True)
class PrecisionContext:
    """Working precision and the geometric delta ladder for series extraction."""

    digits: int = 60
    delta_ladder: tuple[float, ...] = field(default_factory=_default_ladder)

    def validate(self) -> None:
        if self.digits < 30:
            raise ValueError("need at least 30 digits")
        ladder = self.delta_ladder
        if not ladder or any(not 0 < d < 1 for d in ladder):
            raise ValueError("delta ladder must lie in (0, 1)")
        if any(b >= a for a, b in zip(ladder, ladder[1:])):
            raise ValueError("delta ladder must be strictly decreasing")


@dataclass(frozen=True)
class LeadingOrderReport:
    r: int
    kind: str
    x: float
    estimated_K: float
    expected_K: float
    relative_error: float
    fitted_exponent: float


def kr_closed_form(r: int) -> int:
    """Exact leading coefficient K_r = 2^{r(r-1)/2} prod_{k=1}^{r-1} k!."""
    if r < 1:
        raise ValueError("minor order must be positive")
    out = 2 ** (r * (r - 1) // 2)
    for k in range(1, r):
        out *= math.factorial(k)
    return out


def _moment_rate(N: int, x: float, k: int) -> float:
    """d/dt of the k-th moment at t=0 for a point mass at x."""
    return x**k * k * (-N - 1 + k + (N - k) * x)


def linearized_minor_check(N: int, x: float, delta: float):
    """Signs of the four first-order minor conditions at step delta.

    Returns (all_nonnegative, (det H1, det H2, det Hbar1, det Hbar2)),
    each evaluated in its linearized form. Only the det Hbar1 condition
    constrains delta; it holds for every x in [0, 1] whenever delta < 1/N.
    """
    if not 0 <= x <= 1:
        raise ValueError("x outside [0, 1]")
    if delta <= 0:
        raise ValueError("step must be positive")
    md = [_moment_rate(N, x, k) for k in range(5)]
    d_h1 = 1.0 + delta * md[0]
    d_h2 = delta * (md[0] * x**2 + md[2] - 2 * x * md[1])
    d_hbar1 = x - x**2 + delta * (md[1] - md[2])
    d_hbar2 = delta * x * (1 - x) * (
        md[3] - md[4] + x**2 * (md[1] - md[2]) - 2 * x * (md[2] - md[3])
    )
    values = (d_h1, d_h2, d_hbar1, d_hbar2)
    ok = all(v >= -1e-12 for v in values)
    return ok, values


def _evolved_moments(N: int, x, delta, dps: int):
    """exp(delta Mbar) v(x) by truncated Taylor series in mpmath.

    The generator is bidiagonal, so each term is a cheap sparse product;
    convergence is geometric once i exceeds delta * ||Mbar||.
    """
    gen = moment_generator(N)
    beta = [int(b) for b in gen.beta]
    lam = [int(l) for l in gen.lam]
    v = [mp.power(x, k) for k in range(N + 1)]
    total = list(v)
    term = list(v)
    cutoff = mp.mpf(10) ** (-(dps + 10))
    for i in range(1, 400):
        nxt = [mp.mpf(0)] * (N + 1)
        for k in range(N + 1):
            val = -beta[k] * term[k]
            if k + 1 <= N:
                val += lam[k + 1] * term[k + 1]
            nxt[k] = val * delta / i
        term = nxt
        for k in range(N + 1):
            total[k] += term[k]
        if max(abs(t) for t in term) < cutoff:
            return total
    raise ArithmeticError("Taylor series for the moment exponential did not converge")


def _minor_determinant(m, r: int, kind: str):
    if kind == "plain":
        A = mp.matrix([[m[i + j] for j in range(r)] for i in range(r)])
    elif kind == "shifted":
        A = mp.matrix(
            [[m[i + j + 1] - m[i + j + 2] for j in range(r)] for i in range(r)]
        )
    else:
        raise ValueError("kind must be 'plain' or 'shifted'")
    return mp.det(A)


def leading_coefficient_extract(
    N: int,
    r: int,
    kind: str,
    x: float,
    ctx: PrecisionContext | None = None,
) -> LeadingOrderReport:
    """Numerically extract K_r and the delta exponent of a Hankel minor.

    Divides the determinant by the predicted x/(1-x)/delta powers and
    strips the O(delta) correction by Richardson extrapolation over the
    geometric ladder. Raises when the extrapolation residual exceeds 1e-6
    relative (raise the digit count in that case).
    """
    ctx = ctx or PrecisionContext()
    ctx.validate()
    if not 0 < x < 1:
        raise ValueError("x must lie strictly inside (0, 1)")
    if kind == "plain":
        if not 2 <= r <= N // 2 + 1:
            raise ValueError("minor order out of range")
        x_pow = r * (r - 1)
        y_pow = r * (r - 1) // 2
    elif kind == "shifted":
        if not 2 <= r <= (N - 1) // 2 + 1 or 2 * r > N:
            raise ValueError("minor order out of range")
        x_pow = r * r
        y_pow = r * (r + 1) // 2
    else:
        raise ValueError("kind must be 'plain' or 'shifted'")
    d_pow = r * (r - 1) // 2

    with mp.workdps(ctx.digits):
        xm = mp.mpf(x)
        dets = []
        scaled = []
        for delta in ctx.delta_ladder:
            dm = mp.mpf(delta)
            m = _evolved_moments(N, xm, dm, ctx.digits)
            det = _minor_determinant(m, r, kind)
            dets.append(det)
            scaled.append(
                det / (xm**x_pow * (1 - xm) ** y_pow * dm**d_pow)
            )
        # log-log slope from the smallest rungs; one Richardson step strips
        # the O(delta) bias of the two-point estimate
        ratio = mp.mpf(ctx.delta_ladder[-2]) / mp.mpf(ctx.delta_ladder[-1])
        slope_lo = mp.log(dets[-2] / dets[-1]) / mp.log(ratio)
        slope_hi = mp.log(dets[-3] / dets[-2]) / mp.log(
            mp.mpf(ctx.delta_ladder[-3]) / mp.mpf(ctx.delta_ladder[-2])
        )
        fitted_exponent = float((ratio * slope_lo - slope_hi) / (ratio - 1))
        # Richardson table eliminating integer powers of delta
        table = list(scaled)
        estimates = [table[-1]]
        for k in range(1, len(table)):
            factor = ratio**k
            table = [
                (factor * table[j + 1] - table[j]) / (factor - 1)
                for j in range(len(table) - 1)
            ]
            estimates.append(table[-1])
        estimate = estimates[-1]
        residual = abs(estimates[-1] - estimates[-2]) / abs(estimate)
        if residual > mp.mpf("1e-6"):
            raise ArithmeticError("increase digits: extrapolation did not settle")
        expected = kr_closed_form(r)
        rel_err = float(abs(estimate - expected) / expected)
        return LeadingOrderReport(
            r=r,
            kind=kind,
            x=float(x),
            estimated_K=float(estimate),
            expected_K=float(expected),
            relative_error=rel_err,
            fitted_exponent=fitted_exponent,
        )
