"""Exact evaluation of the Fabius function at dyadic rationals.

The Fabius function is the unique continuous f on [0, oo) with

    f(x) + f(1 - x) = 1   on [0, 1],        f(x) = int_0^(2x) f(t) dt,

so f(0) = 0, f(1) = 1, and f takes rational values at every dyadic
rational.  Evaluation on [0, 1] works by *pairing descent* on the odd
numerator: split d = k/2**M (k odd, 1 < k < 2**M) at the leading bit of
k, so d = (1 + x)/2**m with x = p/2**q in (0, 1), and trade f(d) for the
value at the partner (1 - x)/2**m = (2**q - p)/2**M via the appropriate
polynomial identity,

    m = 2n - 1 odd:   f(d) = S_n(x)/2**(2n^2-2n+1) - f(partner)
    m = 2n   even:    f(d) = D_n(x)/2**(2n^2)      + f(partner).

The partner's odd numerator 2**q - p is strictly smaller than k, so the
chain reaches a pure power of two in at most bit_length(k) steps; powers
of two come straight from the identities at x = 0 and x = 1:

    f(1/2**(2n-1)) = S_n(0)/2**(2n^2-2n+2)
    f(1/2**(2n-2)) = S_n(1)/2**(2n^2-2n+1).

Beyond [0, 1] the graph is the bell of f over [0, 2] repeated on each
interval [2M, 2M+2] with sign (-1)**t(M), where t is the Thue-Morse
bit-parity sequence; see :func:`eval_extended`.  This sign convention is
pinned down by the exact decomposition of the defining integral over
whole bells, which the verification suite checks term by term.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Optional, Union

from .identities import IdentityTable
from .rationals import (
    DomainError,
    DyadicRational,
    RationalLike,
    as_dyadic,
    exact_fraction,
    normalize_dyadic,
    split_leading_bit,
)

__all__ = [
    "ApproxResult",
    "FabiusEvaluator",
    "FabiusValue",
    "approx_eval",
    "default_evaluator",
    "eval_extended",
    "eval_reflected",
    "eval_unit",
    "thue_morse",
    "values_at_denominator",
]

DyadicLike = Union[DyadicRational, RationalLike]

#: Default bound on the number of memoized values.  Entries are never
#: evicted; once the cache is full new values are simply not stored.
DEFAULT_CACHE_LIMIT = 1 << 16

_ZERO = Fraction(0)
_ONE = Fraction(1)
_HALF = Fraction(1, 2)


def thue_morse(m: int) -> int:
    """Thue-Morse sequence t(m): parity of the number of set bits, t(0) = 0."""
    if m < 0:
        raise ValueError(f"thue_morse needs m >= 0, got {m}")
    return m.bit_count() & 1


@dataclass(frozen=True)
class FabiusValue:
    """An exactly evaluated point: f(argument) = value."""

    argument: DyadicRational
    value: Fraction


@dataclass(frozen=True)
class ApproxResult:
    """Certified approximation of f at an arbitrary nonnegative rational.

    ``value`` is the exact function value at the dyadic ``anchor``, and
    |f(query) - value| <= error_bound is guaranteed by the Lipschitz
    bound |f'| = |2 f(2x)| <= 2 everywhere.
    """

    query: Fraction
    anchor: DyadicRational
    value: Fraction
    error_bound: Fraction


class FabiusEvaluator:
    """Evaluator with an identity table grown on demand and a bounded memo cache.

    ``reflect`` controls the default shortcut f(d) = 1 - f(1 - d) for
    d > 1/2 (shorter descents); per-call overrides keep both code paths
    independently testable.  Evaluation is pure given the table; cache
    updates are atomic per entry, so concurrent callers may duplicate
    work but never observe a wrong value.
    """

    def __init__(
        self,
        table: Optional[IdentityTable] = None,
        cache_limit: int = DEFAULT_CACHE_LIMIT,
        reflect: bool = True,
    ):
        self.table = table if table is not None else IdentityTable()
        self._cache_limit = max(0, cache_limit)
        self._cache: dict[tuple[int, int], Fraction] = {}
        self._reflect = reflect

    @property
    def cache_size(self) -> int:
        return len(self._cache)

    def _cache_put(self, key: tuple[int, int], value: Fraction) -> None:
        if len(self._cache) < self._cache_limit:
            self._cache[key] = value

    def _power_of_two_value(self, m: int) -> Fraction:
        """f(1/2**m) for m >= 1, from a sum identity at x = 0 or x = 1."""
        if m % 2:
            s = self.table.sum_identity((m + 1) // 2)
            value = s.coeffs[0] / (1 << (s.sigma + 1))
        else:
            s = self.table.sum_identity((m + 2) // 2)
            value = s.evaluate(1) / (1 << s.sigma)
        self._cache_put((1, m), value)
        return value

    def _descend(self, d: DyadicRational) -> Fraction:
        """Pairing descent without the reflection shortcut."""
        chain: list[tuple[tuple[int, int], Fraction, bool]] = []
        cur = d
        while True:
            k, m = cur.numerator, cur.exponent
            value = self._cache.get((k, m))
            if value is not None:
                break
            if k == 0:
                value = _ZERO
                break
            if m == 0:  # cur == 1 inside [0, 1]
                value = _ONE
                break
            if k == 1:
                value = self._power_of_two_value(m)
                break
            q, p, inner, x = split_leading_bit(cur)
            xq = x.as_fraction
            if inner % 2:
                s = self.table.sum_identity((inner + 1) // 2)
                term = s.evaluate(xq) / (1 << s.sigma)
                negate_child = True
            else:
                diff = self.table.diff_identity(inner // 2)
                term = diff.evaluate(xq) / (1 << diff.sigma)
                negate_child = False
            chain.append(((k, m), term, negate_child))
            cur = DyadicRational((1 << q) - p, m)
        for key, term, negate_child in reversed(chain):
            value = term - value if negate_child else term + value
            self._cache_put(key, value)
        return value

    def eval_unit(self, d: DyadicLike, reflect: Optional[bool] = None) -> Fraction:
        """Exact f(d) for a dyadic rational d in [0, 1]."""
        d = as_dyadic(d)
        if d > 1:
            raise DomainError(f"eval_unit needs d in [0, 1], got {d}")
        if reflect is None:
            reflect = self._reflect
        if reflect and d > _HALF:
            return _ONE - self._descend(d.complement())
        return self._descend(d)

    def eval_reflected(self, d: DyadicLike) -> Fraction:
        """f(d) computed as 1 - f(1 - d): an independent path for d in [0, 1]."""
        d = as_dyadic(d)
        if d > 1:
            raise DomainError(f"eval_reflected needs d in [0, 1], got {d}")
        return _ONE - self.eval_unit(d.complement(), reflect=False)

    def eval_extended(self, d: DyadicLike) -> Fraction:
        """Exact f(d) for any dyadic d >= 0.

        Writes d = 2M + r with r in [0, 2); the bell over [0, 2] is
        symmetric about 1, and the copy over [2M, 2M+2] carries the sign
        (-1)**t(M) with t the Thue-Morse sequence.
        """
        d = as_dyadic(d)
        k, m = d.numerator, d.exponent
        whole_halves = k >> (m + 1)  # M = floor(d / 2)
        rest = normalize_dyadic(k - (whole_halves << (m + 1)), m)  # r in [0, 2)
        if rest <= 1:
            bell = self.eval_unit(rest, reflect=False)
        else:
            mirrored = normalize_dyadic((1 << (rest.exponent + 1)) - rest.numerator,
                                        rest.exponent)
            bell = self.eval_unit(mirrored, reflect=False)
        return -bell if thue_morse(whole_halves) else bell

    def approx_eval(self, x: RationalLike, eps: RationalLike) -> ApproxResult:
        """Certified approximation of f(x) for any rational x >= 0.

        Rounds x to the nearest dyadic on a grid one bit finer than eps
        requires, evaluates there exactly, and certifies the error via
        |f'| <= 2: error_bound = 2 |x - anchor| <= 2**(-m-1) <= eps with
        m = ceil(log2(1/eps)).
        """
        x = exact_fraction(x)
        eps = exact_fraction(eps)
        if x < 0:
            raise DomainError(f"approx_eval needs x >= 0, got {x}")
        if eps <= 0:
            raise DomainError(f"approx_eval needs eps > 0, got {eps}")
        # Smallest m >= 0 with 2**-m <= eps.
        inv_ceil = -(-eps.denominator // eps.numerator)
        m = (inv_ceil - 1).bit_length()
        grid_exp = m + 1
        nearest = round(x * (1 << grid_exp))  # ties to even: deterministic
        anchor = normalize_dyadic(nearest, grid_exp)
        error_bound = 2 * abs(x - anchor.as_fraction)
        return ApproxResult(
            query=x,
            anchor=anchor,
            value=self.eval_extended(anchor),
            error_bound=error_bound,
        )

    def values_at_denominator(self, m: int) -> Iterator[FabiusValue]:
        """Yield f(j/2**m) for j = 0..2**m in increasing order of j."""
        if m < 0:
            raise DomainError(f"values_at_denominator needs m >= 0, got {m}")
        for j in range((1 << m) + 1):
            d = normalize_dyadic(j, m)
            yield FabiusValue(d, self.eval_unit(d))


#: Shared default evaluator behind the module-level convenience functions.
default_evaluator = FabiusEvaluator()


def eval_unit(d: DyadicLike, reflect: Optional[bool] = None) -> Fraction:
    return default_evaluator.eval_unit(d, reflect=reflect)


def eval_reflected(d: DyadicLike) -> Fraction:
    return default_evaluator.eval_reflected(d)


def eval_extended(d: DyadicLike) -> Fraction:
    return default_evaluator.eval_extended(d)


def approx_eval(x: RationalLike, eps: RationalLike) -> ApproxResult:
    return default_evaluator.approx_eval(x, eps)


def values_at_denominator(m: int) -> Iterator[FabiusValue]:
    return default_evaluator.values_at_denominator(m)
