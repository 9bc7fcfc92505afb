"""Independent distributional oracle for the Fabius function.

The Fabius function equals the cumulative distribution function of the
random series  X = sum_{n>=1} 2**-n U_n  with U_n independent uniforms
on [0, 1].  Truncating the series at level N gives X_N whose CDF F_N is
an exact piecewise polynomial, and since the discarded tail lies in
[0, 2**-N],

    F_N(x - 2**-N)  <=  f(x)  <=  F_N(x)            for every x,

with bracket width at most 2**(1-N) because the density of X_N is
bounded by 2.  Nothing here touches the polynomial identity tables, so
these brackets are an independent check on the exact evaluator.

Two routes compute F_N:

* :func:`truncated_cdf` materializes the full piecewise polynomial by N
  successive exact convolutions with scaled uniforms,
  F_next(x) = 2**n * int_{x-2**-n}^{x} F(t) dt.  Faithful and fully
  inspectable, but the piece count doubles per level (2**N pieces), so
  it is practical up to N around 14.

* :func:`cdf_value` evaluates F_N at a single rational point in
  O(N^2) exact operations through the self-similarity
  F_N(x) = G_{N-1}(2x) - G_{N-1}(2x - 1), where G is the running
  integral of F_{N-1}.  This is what :func:`bracket` uses, so brackets
  at N = 20 cost microseconds, not gigabytes.

The two routes are cross-checked exactly in the test suite.
"""

from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .rationals import DomainError, RationalLike, exact_fraction

__all__ = [
    "MonteCarloEstimate",
    "PiecewisePolynomialCDF",
    "bracket",
    "cdf_of_uniform_sum",
    "cdf_value",
    "monte_carlo_estimate",
    "truncated_cdf",
]

MAX_CDF_LEVEL = 24

_ZERO = Fraction(0)
_ONE = Fraction(1)


def _check_level(level: int) -> int:
    if not 1 <= level <= MAX_CDF_LEVEL:
        raise DomainError(
            f"truncation level must be in 1..{MAX_CDF_LEVEL}, got {level}"
        )
    return level


# ---------------------------------------------------------------------------
# Dense piecewise-polynomial route (exact convolution)
# ---------------------------------------------------------------------------

def _poly_eval(coeffs: Sequence[Fraction], y: Fraction) -> Fraction:
    acc = _ZERO
    for c in reversed(coeffs):
        acc = acc * y + c
    return acc


def _poly_shift(coeffs: Sequence[Fraction], delta: Fraction) -> tuple[Fraction, ...]:
    """Re-anchor a polynomial: coefficients of p(y + delta) from those of p."""
    out: list[Fraction] = []
    for c in reversed(coeffs):
        new = [_ZERO] * (len(out) + 1)
        for i, b in enumerate(out):
            new[i + 1] += b
            new[i] += delta * b
        new[0] += c
        out = new
    return tuple(out) if out else (_ZERO,)


def _poly_sub(a: Sequence[Fraction], b: Sequence[Fraction]) -> tuple[Fraction, ...]:
    n = max(len(a), len(b))
    return tuple(
        (a[i] if i < len(a) else _ZERO) - (b[i] if i < len(b) else _ZERO)
        for i in range(n)
    )


def _poly_trim(coeffs: Sequence[Fraction]) -> tuple[Fraction, ...]:
    # Canonical form: no trailing zero coefficients (keeps piecewise
    # representations identical regardless of construction order).
    n = len(coeffs)
    while n > 1 and coeffs[n - 1] == 0:
        n -= 1
    return tuple(coeffs[:n])


@dataclass(frozen=True)
class PiecewisePolynomialCDF:
    """Exact CDF of a sum of independent scaled uniforms.

    Parameters
    ----------
    level : int
        Number of convolved uniforms.
    breakpoints : tuple of Fraction
        Strictly increasing; support is [breakpoints[0], breakpoints[-1]].
    pieces : tuple of coefficient tuples
        ``pieces[i]`` holds the polynomial on
        [breakpoints[i], breakpoints[i+1]] in powers of
        (x - breakpoints[i]); anchoring at the left endpoint keeps
        coefficient growth modest.

    The function is 0 left of the support, 1 right of it, continuous at
    every breakpoint, and each piece has degree <= level.
    """

    level: int
    breakpoints: tuple[Fraction, ...]
    pieces: tuple[tuple[Fraction, ...], ...]

    def evaluate(self, x: RationalLike) -> Fraction:
        x = exact_fraction(x)
        if x <= self.breakpoints[0]:
            return _ZERO
        if x >= self.breakpoints[-1]:
            return _ONE
        i = bisect_right(self.breakpoints, x) - 1
        return _poly_eval(self.pieces[i], x - self.breakpoints[i])

    @property
    def support(self) -> tuple[Fraction, Fraction]:
        return self.breakpoints[0], self.breakpoints[-1]

    def validate(self, samples_per_piece: int = 2) -> None:
        """Raise ValueError unless all structural invariants hold.

        Checks monotone breakpoints, piece count and degree, the exact
        endpoint values 0 and 1, exact continuity at every breakpoint,
        and nondecreasing values on a sampled grid.
        """
        bps, pieces = self.breakpoints, self.pieces
        if len(bps) != len(pieces) + 1:
            raise ValueError("piece count must be len(breakpoints) - 1")
        if any(a >= b for a, b in zip(bps, bps[1:])):
            raise ValueError("breakpoints must be strictly increasing")
        if any(len(p) > self.level + 1 for p in pieces):
            raise ValueError(f"piece degree exceeds level {self.level}")
        if pieces[0][0] != 0:
            raise ValueError("CDF must equal 0 at the left end of support")
        if _poly_eval(pieces[-1], bps[-1] - bps[-2]) != 1:
            raise ValueError("CDF must equal 1 at the right end of support")
        for i in range(len(pieces) - 1):
            left = _poly_eval(pieces[i], bps[i + 1] - bps[i])
            right = pieces[i + 1][0]
            if left != right:
                raise ValueError(f"discontinuity at breakpoint {bps[i + 1]}")
        prev = _ZERO
        for i, piece in enumerate(pieces):
            width = bps[i + 1] - bps[i]
            for k in range(1, samples_per_piece + 1):
                val = _poly_eval(piece, width * k / samples_per_piece)
                if val < prev:
                    raise ValueError(f"CDF decreases inside piece {i}")
                prev = val


def _uniform_cdf(width: Fraction) -> PiecewisePolynomialCDF:
    return PiecewisePolynomialCDF(
        level=1,
        breakpoints=(_ZERO, width),
        pieces=((_ZERO, 1 / width),),
    )


def _convolve_uniform(cdf: PiecewisePolynomialCDF, width: Fraction) -> PiecewisePolynomialCDF:
    """Exact CDF of X + width*U from the CDF of X.

    F_next(x) = (G(x) - G(x - width)) / width with G the running
    integral of F; G is linear with slope 1 past the support and zero
    below it.
    """
    h = exact_fraction(width)
    if h <= 0:
        raise DomainError(f"uniform width must be positive, got {h}")
    bps = cdf.breakpoints
    b_last = bps[-1]

    g_pieces: list[tuple[Fraction, ...]] = []
    total = _ZERO
    for i, piece in enumerate(cdf.pieces):
        g = (total, *(c / (j + 1) for j, c in enumerate(piece)))
        g_pieces.append(g)
        total = _poly_eval(g, bps[i + 1] - bps[i])
    g_last = total

    def g_poly_at(anchor: Fraction) -> tuple[Fraction, ...]:
        # Polynomial of G on the piece containing [anchor, next breakpoint],
        # re-anchored at ``anchor``; anchor must be >= 0.
        if anchor >= b_last:
            return (g_last + (anchor - b_last), _ONE)
        i = bisect_right(bps, anchor) - 1
        return _poly_shift(g_pieces[i], anchor - bps[i])

    new_bps = sorted({*bps, *(b + h for b in bps)})
    pieces = []
    for u, v in zip(new_bps, new_bps[1:]):
        upper = g_poly_at(u)
        lower = (_ZERO,) if v <= h else g_poly_at(u - h)
        pieces.append(_poly_trim([c / h for c in _poly_sub(upper, lower)]))
    return PiecewisePolynomialCDF(
        level=cdf.level + 1,
        breakpoints=tuple(new_bps),
        pieces=tuple(pieces),
    )


def cdf_of_uniform_sum(widths: Sequence[RationalLike]) -> PiecewisePolynomialCDF:
    """Exact CDF of sum_i width_i * U_i by successive convolution."""
    if not widths:
        raise DomainError("need at least one uniform")
    ws = [exact_fraction(w) for w in widths]
    cdf = _uniform_cdf(ws[0])
    for w in ws[1:]:
        cdf = _convolve_uniform(cdf, w)
    return cdf


def truncated_cdf(level: int) -> PiecewisePolynomialCDF:
    """Exact piecewise-polynomial CDF of X_N = sum_{n=1..N} 2**-n U_n.

    Piece count is 2**N, so keep N modest when materializing; use
    :func:`cdf_value` or :func:`bracket` for large N.
    """
    _check_level(level)
    return cdf_of_uniform_sum([Fraction(1, 1 << n) for n in range(1, level + 1)])


# ---------------------------------------------------------------------------
# Pointwise route (exact, O(N^2) per point)
# ---------------------------------------------------------------------------
#
# Write V_j(m, t) for the j-th iterated running integral of F_m at t
# (V_0 = F_m).  Splitting off the widest uniform, X_m = (U + X_{m-1})/2,
# and integrating the resulting relation j times gives
#
#     V_j(m, t) = 2**-j * ( V_{j+1}(m-1, 2t) - V_{j+1}(m-1, 2t - 1) ).
#
# Arguments <= 0 give 0.  Past the right end of support r_m = 1 - 2**-m
# the CDF is identically 1, so V_j is the Taylor polynomial
#
#     V_j(m, t) = sum_{i=0..j} V_i(m, r_m) * (t - r_m)**(j-i) / (j-i)!
#
# whose boundary coefficients V_i(m, r_m) follow the same recursion and
# are cached module-wide.  At m = 1 everything is closed form:
# V_j(1, t) = 2 t**(j+1)/(j+1)! on [0, 1/2].  For a fixed rational t the
# live (non-saturated) branch count stays O(1) per level, so one point
# costs O(N^2) exact operations in total.

_boundary_integrals: dict[tuple[int, int], Fraction] = {}


def _support_end(m: int) -> Fraction:
    return 1 - Fraction(1, 1 << m)


def _boundary_integral(m: int, i: int) -> Fraction:
    """V_i(m, r_m): i-th iterated integral of F_m at the right support end."""
    if i == 0:
        return _ONE
    if m == 1:
        return Fraction(1, (1 << i) * math.factorial(i + 1))
    cached = _boundary_integrals.get((m, i))
    if cached is None:
        r = _support_end(m)
        upper = _iterated_integral(i + 1, m - 1, 2 * r, {})
        lower = _iterated_integral(i + 1, m - 1, 2 * r - 1, {})
        cached = (upper - lower) / (1 << i)
        _boundary_integrals[(m, i)] = cached
    return cached


def _saturated(j: int, m: int, t: Fraction) -> Fraction:
    r = _support_end(m)
    dt = t - r
    return sum(
        (
            _boundary_integral(m, i) * dt ** (j - i) / math.factorial(j - i)
            for i in range(j + 1)
        ),
        _ZERO,
    )


def _iterated_integral(j: int, m: int, t: Fraction, memo: dict) -> Fraction:
    if t <= 0:
        return _ZERO
    if t >= _support_end(m):
        return _saturated(j, m, t)
    if m == 1:
        return 2 * t ** (j + 1) / math.factorial(j + 1)
    key = (j, m, t)
    value = memo.get(key)
    if value is None:
        upper = _iterated_integral(j + 1, m - 1, 2 * t, memo)
        lower = _iterated_integral(j + 1, m - 1, 2 * t - 1, memo)
        value = (upper - lower) / (1 << j)
        memo[key] = value
    return value


def cdf_value(x: RationalLike, level: int) -> Fraction:
    """Exact value of the truncated-series CDF F_N at a single rational x."""
    _check_level(level)
    return _iterated_integral(0, level, exact_fraction(x), {})


def bracket(x: RationalLike, level: int) -> tuple[Fraction, Fraction]:
    """Exact bounds F_N(x - 2**-N) <= f(x) <= F_N(x) for x in [0, 1].

    Sound because the discarded series tail lies in [0, 2**-N]; the
    bracket width is at most 2**(1-N).
    """
    xq = exact_fraction(x)
    if not 0 <= xq <= 1:
        raise DomainError(f"bracket needs x in [0, 1], got {xq}")
    _check_level(level)
    tail = Fraction(1, 1 << level)
    return cdf_value(xq - tail, level), cdf_value(xq, level)


# ---------------------------------------------------------------------------
# Monte Carlo smoke test (statistical, never part of exact verification)
# ---------------------------------------------------------------------------

_MC_DEPTH = 40
_MC_CHUNK = 1 << 16


@dataclass(frozen=True)
class MonteCarloEstimate:
    estimate: float
    std_error: float
    samples: int
    seed: int


def monte_carlo_estimate(
    x: RationalLike, samples: int, seed: int,
    rng: Optional[np.random.Generator] = None,
) -> MonteCarloEstimate:
    """Empirical CDF of sum_{n<=40} 2**-n U_n at x, with binomial standard error.

    Deterministic for a given seed.  This is a smoke test for gross
    errors only; all real verification in this package is exact.
    """
    if samples < 1:
        raise DomainError(f"need at least one sample, got {samples}")
    xf = float(exact_fraction(x))
    if rng is None:
        rng = np.random.default_rng(seed)
    weights = 0.5 ** np.arange(1, _MC_DEPTH + 1)
    hits = 0
    remaining = samples
    while remaining > 0:
        n = min(_MC_CHUNK, remaining)
        sums = rng.random((n, _MC_DEPTH)) @ weights
        hits += int(np.count_nonzero(sums <= xf))
        remaining -= n
    p = hits / samples
    return MonteCarloEstimate(
        estimate=p,
        std_error=math.sqrt(p * (1 - p) / samples),
        samples=samples,
        seed=seed,
    )
