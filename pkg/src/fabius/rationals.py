"""Exact rational and dyadic-rational arithmetic.

Every quantity in this package is computed in exact rational arithmetic.
The universal number type is ``ExactRational``, an alias for the standard
library's ``fractions.Fraction``: always stored in lowest terms with a
positive denominator (zero is 0/1), with exact add/subtract/multiply/
divide/compare and no rounding anywhere.  Its text form is ``"num/den"``
in base 10 with an optional leading ``-``; integers may omit ``/den``.
``Fraction(text)`` parses both forms and ``str()`` emits them, so no
extra parsing layer is needed.

This module adds the dyadic layer on top: :class:`DyadicRational` is the
canonical representation of a nonnegative number k / 2**m, together with
the leading-bit decomposition the function evaluator is built on and a
correctly rounded decimal renderer for display.
"""

from __future__ import annotations

import decimal
from fractions import Fraction
from typing import NamedTuple, Union

__all__ = [
    "ExactRational",
    "DomainError",
    "DyadicRational",
    "LeadingBitSplit",
    "as_dyadic",
    "exact_fraction",
    "is_power_of_two",
    "normalize_dyadic",
    "split_leading_bit",
    "to_decimal_string",
]

ExactRational = Fraction

#: Inputs accepted wherever an exact number is expected.  Floats are
#: deliberately excluded: a float literal like 0.3 is not the number the
#: user wrote, and silently accepting it would break exactness claims.
RationalLike = Union[Fraction, int, str, decimal.Decimal]


class DomainError(ValueError):
    """An argument lies outside an operation's mathematical domain."""


def is_power_of_two(n: int) -> bool:
    """True iff ``n`` is 1, 2, 4, 8, ..."""
    return n >= 1 and n & (n - 1) == 0


def exact_fraction(value: RationalLike) -> Fraction:
    """Convert ``value`` to an exact Fraction, refusing floats.

    Accepts Fraction, int, Decimal, and strings such as ``"-5/72"``,
    ``"3"`` or ``"0.3125"``.
    """
    if isinstance(value, float):
        raise TypeError(
            "refusing to convert float to an exact rational; pass a string, "
            "int, Fraction or Decimal instead"
        )
    return Fraction(value)


class DyadicRational:
    """A nonnegative dyadic rational k / 2**m in canonical form.

    Canonical means fully reduced: either the exponent m is 0 (an
    integer, including zero) or the numerator k is odd.  The constructor
    enforces canonicity; use :func:`normalize_dyadic` to build one from
    arbitrary (k, m).

    Instances are immutable, hashable, and totally ordered against other
    dyadics, ints and Fractions.  They convert losslessly to Fraction via
    :attr:`as_fraction`; the reverse conversion
    (:meth:`from_rational`) succeeds iff the reduced denominator is a
    power of two.
    """

    __slots__ = ("numerator", "exponent")

    def __init__(self, numerator: int, exponent: int):
        if numerator < 0:
            raise ValueError(f"dyadic numerator must be nonnegative, got {numerator}")
        if exponent < 0:
            raise ValueError(f"dyadic exponent must be nonnegative, got {exponent}")
        if exponent > 0 and numerator % 2 == 0:
            raise ValueError(
                f"{numerator}/2^{exponent} is not canonical; use normalize_dyadic()"
            )
        object.__setattr__(self, "numerator", numerator)
        object.__setattr__(self, "exponent", exponent)

    def __setattr__(self, name, value):
        raise AttributeError("DyadicRational is immutable")

    @classmethod
    def from_rational(cls, value: RationalLike) -> "DyadicRational":
        """Build from an exact rational whose denominator is a power of two."""
        q = exact_fraction(value)
        if q < 0:
            raise ValueError(f"dyadic rationals here are nonnegative, got {q}")
        if not is_power_of_two(q.denominator):
            raise ValueError(
                f"{q} is not a dyadic rational (denominator {q.denominator} "
                "is not a power of two)"
            )
        return cls(q.numerator, q.denominator.bit_length() - 1)

    @property
    def as_fraction(self) -> Fraction:
        return Fraction(self.numerator, 1 << self.exponent)

    def complement(self) -> "DyadicRational":
        """1 - self, for self in [0, 1]."""
        if self > 1:
            raise DomainError(f"complement needs a value in [0, 1], got {self}")
        return normalize_dyadic((1 << self.exponent) - self.numerator, self.exponent)

    def _cmp_value(self, other) -> Fraction:
        if isinstance(other, DyadicRational):
            return other.as_fraction
        if isinstance(other, (int, Fraction)):
            return Fraction(other)
        return NotImplemented

    def __eq__(self, other):
        if isinstance(other, DyadicRational):
            return (self.numerator, self.exponent) == (other.numerator, other.exponent)
        v = self._cmp_value(other)
        return NotImplemented if v is NotImplemented else self.as_fraction == v

    def __hash__(self):
        return hash(self.as_fraction)

    def __lt__(self, other):
        v = self._cmp_value(other)
        return NotImplemented if v is NotImplemented else self.as_fraction < v

    def __le__(self, other):
        v = self._cmp_value(other)
        return NotImplemented if v is NotImplemented else self.as_fraction <= v

    def __gt__(self, other):
        v = self._cmp_value(other)
        return NotImplemented if v is NotImplemented else self.as_fraction > v

    def __ge__(self, other):
        v = self._cmp_value(other)
        return NotImplemented if v is NotImplemented else self.as_fraction >= v

    def __float__(self):
        return self.numerator / (1 << self.exponent)

    def __str__(self):
        if self.exponent == 0:
            return str(self.numerator)
        return f"{self.numerator}/2^{self.exponent}"

    def __repr__(self):
        return f"DyadicRational({self.numerator}, {self.exponent})"


def normalize_dyadic(numerator: int, exponent: int) -> DyadicRational:
    """Canonicalize k / 2**m by stripping common factors of two.

    Value-preserving and idempotent; zero normalizes to 0/2^0.
    """
    if numerator < 0 or exponent < 0:
        raise ValueError("normalize_dyadic needs nonnegative numerator and exponent")
    if numerator == 0:
        return DyadicRational(0, 0)
    while exponent > 0 and numerator % 2 == 0:
        numerator //= 2
        exponent -= 1
    return DyadicRational(numerator, exponent)


def as_dyadic(value: Union[RationalLike, DyadicRational]) -> DyadicRational:
    """Coerce to DyadicRational, accepting "5/16", "3/2^5", Fraction, int."""
    if isinstance(value, DyadicRational):
        return value
    if isinstance(value, str):
        text = value.strip()
        if "/2^" in text:
            num_text, _, exp_text = text.partition("/2^")
            return normalize_dyadic(int(num_text), int(exp_text))
    return DyadicRational.from_rational(value)


class LeadingBitSplit(NamedTuple):
    """Decomposition k/2**M = (1 + x)/2**inner_exponent with x = p/2**q."""

    q: int
    p: int
    inner_exponent: int
    x: DyadicRational


def split_leading_bit(d: DyadicRational) -> LeadingBitSplit:
    """Split off the leading bit of the numerator of ``d`` in (0, 1).

    Writing d = k/2**M with k odd and 1 < k < 2**M, the leading bit gives
    k = 2**q + p with q = bit_length(k) - 1 and 0 < p < 2**q, so that

        k / 2**M = (1 + x) / 2**(M - q),    x = p / 2**q in (0, 1).

    The partner value (1 - x)/2**(M - q) = (2**q - p)/2**M has a strictly
    smaller odd numerator, which is what makes descent on k terminate.
    Rejects k = 1 (no second bit to split) and d >= 1.
    """
    k, m = d.numerator, d.exponent
    if k <= 1 or d >= 1:
        raise DomainError(
            f"split_leading_bit needs k/2^M in (0, 1) with k > 1, got {d}"
        )
    q = k.bit_length() - 1
    p = k - (1 << q)
    return LeadingBitSplit(q, p, m - q, DyadicRational(p, q))


def to_decimal_string(value: RationalLike, digits: int) -> str:
    """Correctly rounded fixed-point decimal expansion of an exact rational.

    ``digits`` is the number of digits after the decimal point; ties round
    half to even so output is deterministic.  Display only: no exact value
    in this package is ever derived from a decimal string.
    """
    if digits < 1:
        raise ValueError(f"digits must be >= 1, got {digits}")
    q = exact_fraction(value)
    sign = "-" if q < 0 else ""
    scale = 10 ** digits
    units = round(abs(q) * scale)  # Fraction.__round__ is round-half-to-even
    whole, frac = divmod(units, scale)
    return f"{sign}{whole}.{frac:0{digits}d}"
