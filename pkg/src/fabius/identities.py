"""Scaled polynomial identities satisfied by the Fabius function.

For every level n >= 1 the Fabius function f obeys two closed-form
identities on 0 <= x <= 1, one for sums of values at mirrored arguments
and one for differences:

    2**(2n^2-2n+1) * ( f((1+x)/2**(2n-1)) + f((1-x)/2**(2n-1)) )  =  S_n(x)
    2**(2n^2)      * ( f((1+x)/2**(2n))   - f((1-x)/2**(2n))   )  =  D_n(x)

where S_n is an even polynomial with terms x^0, x^2, ..., x^(2n-2) and
D_n is an odd polynomial with terms x^1, x^3, ..., x^(2n-1), all with
strictly positive rational coefficients.  The power of two on the left
is the *scale exponent* and is stored explicitly as ``sigma``.

The base level is S_1(x) = 2, D_1(x) = 2x.  Each next level follows from
the current difference identity alone.  Writing D_n(x) = a_1 x + a_3 x^3
+ ... + a_(2n-1) x^(2n-1) and

    C = ( a_1/3 + a_3/10 + a_5/21 + ... + a_(2n-1)/(n(2n+1)) ) / (2**(2n) - 1)

integrating the difference identity term by term gives

    S_(n+1) coefficients:  C, a_1/1, a_3/2, ..., a_(2k-1)/k, ...
    D_(n+1) coefficients:  C, a_1/3, a_3/10, ..., a_(2k-1)/(k(2k+1)), ...

with scale exponents 2n^2+2n+1 and 2(n+1)^2.  The same series also gives
the function's value at small odd powers of two,

    f(1/2**(2n+1)) = C / 2**(2n^2+2n+2),

see :func:`small_value_constant`.

:class:`IdentityTable` accumulates levels 1..N, grows on demand, and
serializes to a JSON cache whose loader revalidates every structural
invariant before accepting it.
"""

from __future__ import annotations

import json
import threading
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Iterator, Optional, Union

from .rationals import DomainError, exact_fraction

__all__ = [
    "CacheFormatError",
    "DiffIdentity",
    "IdentityTable",
    "SumIdentity",
    "eval_diff",
    "eval_sum",
    "seed",
    "small_value_constant",
    "step",
]


class CacheFormatError(ValueError):
    """A serialized identity table failed an integrity check on load."""


def _positive_fractions(values: Iterable) -> tuple[Fraction, ...]:
    coeffs = tuple(exact_fraction(v) for v in values)
    if any(c <= 0 for c in coeffs):
        raise ValueError(f"identity coefficients must be strictly positive: {coeffs}")
    return coeffs


def _check_unit_interval(x: Fraction) -> Fraction:
    x = exact_fraction(x)
    if not 0 <= x <= 1:
        raise DomainError(f"identities hold only on [0, 1], got {x}")
    return x


@dataclass(frozen=True)
class SumIdentity:
    """Even polynomial side of the level-n sum identity.

    ``coeffs[k]`` is the coefficient of x**(2k); ``sigma`` is the scale
    exponent 2n^2 - 2n + 1.
    """

    n: int
    sigma: int
    coeffs: tuple[Fraction, ...]

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"level must be >= 1, got {self.n}")
        expected = 2 * self.n * self.n - 2 * self.n + 1
        if self.sigma != expected:
            raise ValueError(
                f"sum identity at level {self.n} must have sigma {expected}, "
                f"got {self.sigma}"
            )
        object.__setattr__(self, "coeffs", _positive_fractions(self.coeffs))
        if len(self.coeffs) != self.n:
            raise ValueError(
                f"sum identity at level {self.n} needs {self.n} coefficients, "
                f"got {len(self.coeffs)}"
            )

    def evaluate(self, x) -> Fraction:
        """Exact value of the polynomial at x in [0, 1] (Horner in x**2)."""
        x = _check_unit_interval(x)
        y = x * x
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * y + c
        return acc

    def __str__(self):
        return _poly_str(self.coeffs, first_power=0)

    def equation_str(self) -> str:
        arg = f"2^{2 * self.n - 1}"
        return (
            f"2^{self.sigma} * (f((1+x)/{arg}) + f((1-x)/{arg})) = {self}"
        )


@dataclass(frozen=True)
class DiffIdentity:
    """Odd polynomial side of the level-n difference identity.

    ``coeffs[k]`` is the coefficient of x**(2k+1); ``sigma`` is the scale
    exponent 2n^2.
    """

    n: int
    sigma: int
    coeffs: tuple[Fraction, ...]

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"level must be >= 1, got {self.n}")
        expected = 2 * self.n * self.n
        if self.sigma != expected:
            raise ValueError(
                f"difference identity at level {self.n} must have sigma "
                f"{expected}, got {self.sigma}"
            )
        object.__setattr__(self, "coeffs", _positive_fractions(self.coeffs))
        if len(self.coeffs) != self.n:
            raise ValueError(
                f"difference identity at level {self.n} needs {self.n} "
                f"coefficients, got {len(self.coeffs)}"
            )

    def evaluate(self, x) -> Fraction:
        """Exact value of the polynomial at x in [0, 1]."""
        x = _check_unit_interval(x)
        y = x * x
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * y + c
        return acc * x

    def __str__(self):
        return _poly_str(self.coeffs, first_power=1)

    def equation_str(self) -> str:
        arg = f"2^{2 * self.n}"
        return (
            f"2^{self.sigma} * (f((1+x)/{arg}) - f((1-x)/{arg})) = {self}"
        )


def _poly_str(coeffs: tuple[Fraction, ...], first_power: int) -> str:
    terms = []
    for k, c in enumerate(coeffs):
        power = first_power + 2 * k
        if power == 0:
            terms.append(str(c))
        else:
            lead = "" if c == 1 else f"{c}*"
            var = "x" if power == 1 else f"x^{power}"
            terms.append(lead + var)
    return " + ".join(terms)


def seed() -> tuple[SumIdentity, DiffIdentity]:
    """The level-1 identities: S_1(x) = 2 with sigma 1, D_1(x) = 2x with sigma 2."""
    two = Fraction(2)
    return SumIdentity(1, 1, (two,)), DiffIdentity(1, 2, (two,))


def _weighted_series(diff: DiffIdentity) -> Fraction:
    # a_1/3 + a_3/10 + a_5/21 + ... with weights k(2k+1)
    return sum(
        (c / (k * (2 * k + 1)) for k, c in enumerate(diff.coeffs, start=1)),
        Fraction(0),
    )


def step(diff: DiffIdentity) -> tuple[SumIdentity, DiffIdentity]:
    """Advance one level: both level-(n+1) identities from the level-n difference.

    Pure and deterministic; the shared constant term C is computed once.
    """
    n = diff.n
    constant = _weighted_series(diff) / ((1 << (2 * n)) - 1)
    sum_coeffs = (constant, *(c / k for k, c in enumerate(diff.coeffs, start=1)))
    diff_coeffs = (
        constant,
        *(c / (k * (2 * k + 1)) for k, c in enumerate(diff.coeffs, start=1)),
    )
    nxt = n + 1
    return (
        SumIdentity(nxt, 2 * n * n + 2 * n + 1, sum_coeffs),
        DiffIdentity(nxt, 2 * nxt * nxt, diff_coeffs),
    )


def small_value_constant(diff: DiffIdentity) -> Fraction:
    """f(1/2**(2n+1)) from the level-n difference identity.

    Setting x = 1 in both level-(n+1) identities and eliminating the
    sum of values gives the closed form

        f(1/2**(2n+1)) = series / ((2**(2n) - 1) * 2**(2n^2+2n+2))

    with series = a_1/3 + a_3/10 + ... + a_(2n-1)/(n(2n+1)).
    """
    n = diff.n
    series = _weighted_series(diff)
    return series / (((1 << (2 * n)) - 1) * (1 << (2 * n * n + 2 * n + 2)))


def eval_sum(identity: SumIdentity, x) -> Fraction:
    return identity.evaluate(x)


def eval_diff(identity: DiffIdentity, x) -> Fraction:
    return identity.evaluate(x)


class IdentityTable:
    """Levels 1..max_n of the sum/difference identities, grown on demand.

    Generation is inherently sequential in the level (each level consumes
    the previous difference identity), so growth happens under a lock;
    finished entries are immutable and safe to share across threads.
    """

    def __init__(self, entries: Optional[Iterable[tuple[SumIdentity, DiffIdentity]]] = None):
        self._entries: list[tuple[SumIdentity, DiffIdentity]] = list(entries or [])
        self._lock = threading.Lock()

    @property
    def max_n(self) -> int:
        return len(self._entries)

    def __eq__(self, other):
        if not isinstance(other, IdentityTable):
            return NotImplemented
        return self._entries == other._entries

    def __iter__(self) -> Iterator[tuple[SumIdentity, DiffIdentity]]:
        return iter(self._entries)

    def ensure_level(self, n: int) -> None:
        """Grow the table so that levels 1..n exist (no-op if they do)."""
        if n <= len(self._entries):
            return
        with self._lock:
            while len(self._entries) < n:
                if not self._entries:
                    self._entries.append(seed())
                else:
                    self._entries.append(step(self._entries[-1][1]))

    def extend_to(self, new_max_n: int) -> "IdentityTable":
        """Extend in place to ``new_max_n`` levels; existing entries unchanged."""
        if new_max_n < self.max_n:
            raise ValueError(
                f"cannot shrink table from {self.max_n} to {new_max_n} levels"
            )
        self.ensure_level(new_max_n)
        return self

    def entry(self, n: int) -> tuple[SumIdentity, DiffIdentity]:
        if n < 1:
            raise ValueError(f"levels start at 1, got {n}")
        self.ensure_level(n)
        return self._entries[n - 1]

    def sum_identity(self, n: int) -> SumIdentity:
        return self.entry(n)[0]

    def diff_identity(self, n: int) -> DiffIdentity:
        return self.entry(n)[1]

    def small_odd_value(self, n: int) -> Fraction:
        """f(1/2**(2n+1)) for n >= 0; the n = 0 case is the seed f(1/2) = 1/2."""
        if n < 0:
            raise ValueError(f"small_odd_value needs n >= 0, got {n}")
        if n == 0:
            return Fraction(1, 2)
        return small_value_constant(self.diff_identity(n))

    def small_odd_values(self) -> dict[int, Fraction]:
        """Map odd exponent 2n+1 -> f(1/2**(2n+1)) for all levels in the table."""
        return {2 * n + 1: self.small_odd_value(n) for n in range(self.max_n + 1)}

    # -- JSON cache -----------------------------------------------------

    def to_json_doc(self, max_n: Optional[int] = None) -> dict:
        limit = self.max_n if max_n is None else min(max_n, self.max_n)
        levels = []
        for s, d in self._entries[:limit]:
            levels.append(
                {
                    "n": s.n,
                    "sigma_s": s.sigma,
                    "s": [str(c) for c in s.coeffs],
                    "sigma_d": d.sigma,
                    "d": [str(c) for c in d.coeffs],
                }
            )
        return {"max_n": limit, "levels": levels}

    @classmethod
    def from_json_doc(cls, doc) -> "IdentityTable":
        """Rebuild a table from its JSON form, revalidating every invariant.

        Rejects (with :class:`CacheFormatError`) any document whose shape,
        scale exponents, coefficient counts, positivity, cross-check
        D_n(1)/2**(2n^2) = S_n(0)/2**(2n^2-2n+2), or strictly decreasing
        constant terms fail.
        """
        try:
            max_n = doc["max_n"]
            levels = doc["levels"]
            if not isinstance(max_n, int) or isinstance(max_n, bool) or max_n < 0:
                raise ValueError(f"bad max_n: {max_n!r}")
            if not isinstance(levels, list) or len(levels) != max_n:
                raise ValueError(
                    f"expected {max_n} levels, found {len(levels) if isinstance(levels, list) else type(levels).__name__}"
                )
            entries = []
            for i, level in enumerate(levels, start=1):
                if level["n"] != i:
                    raise ValueError(f"level {i} is labeled n={level['n']}")
                s = SumIdentity(i, level["sigma_s"], [Fraction(c) for c in level["s"]])
                d = DiffIdentity(i, level["sigma_d"], [Fraction(c) for c in level["d"]])
                entries.append((s, d))
        except CacheFormatError:
            raise
        except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
            raise CacheFormatError(f"malformed identity table: {exc}") from exc

        for s, d in entries:
            # Both sides equal f(1/2**(2n-1)); sigma_s + 1 = 2n^2 - 2n + 2.
            if d.evaluate(1) * (1 << (s.sigma + 1)) != s.coeffs[0] * (1 << d.sigma):
                raise CacheFormatError(
                    f"level {s.n} fails the sum/difference cross-check"
                )
        for prev, cur in zip(entries, entries[1:]):
            if not (cur[0].coeffs[0] < prev[0].coeffs[0]
                    and cur[1].coeffs[0] < prev[1].coeffs[0]):
                raise CacheFormatError(
                    f"constant terms not strictly decreasing at level {cur[0].n}"
                )
        return cls(entries)

    def save(self, path: Union[str, Path]) -> None:
        Path(path).write_text(json.dumps(self.to_json_doc(), indent=1) + "\n")

    @classmethod
    def load(cls, path: Union[str, Path]) -> "IdentityTable":
        try:
            doc = json.loads(Path(path).read_text())
        except json.JSONDecodeError as exc:
            raise CacheFormatError(f"not valid JSON: {exc}") from exc
        return cls.from_json_doc(doc)
