"""Verification suites: golden values, identity consistency, oracle brackets.

Each suite returns a :class:`VerificationReport` rather than raising, so
callers (library users, the command line, the test suite) can render or
merge results.  Failures are listed sorted by input; a report passes iff
its failure list is empty.  Everything here is exact; the only
statistical check in the package, the Monte Carlo smoke test, lives in
:mod:`fabius.oracle` and never feeds a report.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Optional, Sequence

from . import oracle
from .evaluator import FabiusEvaluator
from .rationals import DyadicRational, as_dyadic, normalize_dyadic

__all__ = [
    "CaseFailure",
    "GOLDEN_VALUES",
    "VerificationReport",
    "verify_brackets",
    "verify_golden",
    "verify_identities",
]

# Exact values of f at every dyadic with denominator 2..32, k odd.
_GOLDEN_TABLE = (
    ("1/2", "1/2"),
    ("1/4", "5/72"),
    ("3/4", "67/72"),
    ("1/8", "1/288"),
    ("3/8", "73/288"),
    ("5/8", "215/288"),
    ("7/8", "287/288"),
    ("1/16", "143/2073600"),
    ("3/16", "46657/2073600"),
    ("5/16", "305857/2073600"),
    ("7/16", "777743/2073600"),
    ("9/16", "1295857/2073600"),
    ("11/16", "1767743/2073600"),
    ("13/16", "2026943/2073600"),
    ("15/16", "2073457/2073600"),
    ("1/32", "19/33177600"),
    ("3/32", "25219/33177600"),
    ("5/32", "334781/33177600"),
    ("7/32", "1396781/33177600"),
    ("9/32", "3470381/33177600"),
    ("11/32", "6555581/33177600"),
    ("13/32", "10393219/33177600"),
    ("15/32", "14515219/33177600"),
    ("17/32", "18662381/33177600"),
    ("19/32", "22784381/33177600"),
    ("21/32", "26622019/33177600"),
    ("23/32", "29707219/33177600"),
    ("25/32", "31780819/33177600"),
    ("27/32", "32842819/33177600"),
    ("29/32", "33152381/33177600"),
    ("31/32", "33177581/33177600"),
)

GOLDEN_VALUES: tuple[tuple[DyadicRational, Fraction], ...] = tuple(
    (as_dyadic(arg), Fraction(val)) for arg, val in _GOLDEN_TABLE
)


@dataclass(frozen=True)
class CaseFailure:
    input: str
    expected: str
    got: str


@dataclass
class VerificationReport:
    suite: str
    cases: int
    failures: list[CaseFailure] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures

    def to_dict(self) -> dict:
        return {
            "suite": self.suite,
            "cases": self.cases,
            "failures": [
                {"input": f.input, "expected": f.expected, "got": f.got}
                for f in self.failures
            ],
            "pass": self.passed,
        }

    def __str__(self):
        head = f"{self.suite}: {self.cases - len(self.failures)}/{self.cases} pass"
        if self.passed:
            return head
        lines = [head] + [
            f"  FAIL {f.input}: expected {f.expected}, got {f.got}"
            for f in self.failures
        ]
        return "\n".join(lines)


def _finish(suite: str, cases: int, failures: list[CaseFailure]) -> VerificationReport:
    failures.sort(key=lambda f: f.input)
    return VerificationReport(suite=suite, cases=cases, failures=failures)


def verify_golden(
    evaluate: Optional[Callable[[DyadicRational], Fraction]] = None,
) -> VerificationReport:
    """Compare the evaluator against all 31 embedded golden values, exactly.

    ``evaluate`` defaults to a fresh evaluator whose table grows on
    demand; pass a callable to check an alternative (or deliberately
    broken) evaluation path.
    """
    if evaluate is None:
        evaluate = FabiusEvaluator().eval_unit
    failures = []
    for arg, expected in GOLDEN_VALUES:
        got = evaluate(arg)
        if got != expected:
            failures.append(CaseFailure(str(arg.as_fraction), str(expected), str(got)))
    return _finish("golden-values", len(GOLDEN_VALUES), failures)


def verify_identities(
    max_n: int,
    xs: Optional[Iterable] = None,
    evaluator: Optional[FabiusEvaluator] = None,
) -> VerificationReport:
    """Exact consistency of the identity tables with the evaluator.

    For every level n <= max_n and every sample x in ``xs`` (dyadics in
    [0, 1]; default j/16) checks

        2**(2n^2-2n+1) * (f((1+x)/2**(2n-1)) + f((1-x)/2**(2n-1))) = S_n(x)
        2**(2n^2)      * (f((1+x)/2**(2n))   - f((1-x)/2**(2n)))   = D_n(x)

    plus, per level, the cross-checks D_n(1)/2**(2n^2) =
    S_n(0)/2**(2n^2-2n+2) (both are f(1/2**(2n-1))) and
    S_n(1)/2**(2n^2-2n+1) = f(1/2**(2n-2)).
    """
    if max_n < 1:
        raise ValueError(f"max_n must be >= 1, got {max_n}")
    if evaluator is None:
        evaluator = FabiusEvaluator()
    if xs is None:
        xs = [Fraction(j, 16) for j in range(17)]
    samples = sorted({as_dyadic(x) for x in xs})
    if samples and (samples[0] < 0 or samples[-1] > 1):
        raise ValueError("identity samples must lie in [0, 1]")

    failures = []
    cases = 0
    table = evaluator.table

    def mirrored_arg(x: DyadicRational, shift: int, plus: bool) -> DyadicRational:
        # (1 +- x) / 2**shift as a canonical dyadic
        k, q = x.numerator, x.exponent
        num = (1 << q) + k if plus else (1 << q) - k
        return normalize_dyadic(num, q + shift)

    for n in range(1, max_n + 1):
        s = table.sum_identity(n)
        d = table.diff_identity(n)
        for x in samples:
            xq = x.as_fraction

            cases += 1
            hi = mirrored_arg(x, 2 * n - 1, plus=True)
            lo = mirrored_arg(x, 2 * n - 1, plus=False)
            lhs = (evaluator.eval_unit(hi) + evaluator.eval_unit(lo)) * (1 << s.sigma)
            rhs = s.evaluate(xq)
            if lhs != rhs:
                failures.append(
                    CaseFailure(f"sum identity n={n} x={xq}", str(rhs), str(lhs))
                )

            cases += 1
            hi = mirrored_arg(x, 2 * n, plus=True)
            lo = mirrored_arg(x, 2 * n, plus=False)
            lhs = (evaluator.eval_unit(hi) - evaluator.eval_unit(lo)) * (1 << d.sigma)
            rhs = d.evaluate(xq)
            if lhs != rhs:
                failures.append(
                    CaseFailure(f"difference identity n={n} x={xq}", str(rhs), str(lhs))
                )

        cases += 1
        lhs = d.evaluate(1) / (1 << d.sigma)
        rhs = s.coeffs[0] / (1 << (s.sigma + 1))
        if lhs != rhs:
            failures.append(
                CaseFailure(f"cross-check D/S n={n}", str(rhs), str(lhs))
            )

        cases += 1
        lhs = s.evaluate(1) / (1 << s.sigma)
        rhs = evaluator.eval_unit(DyadicRational(1, 2 * n - 2))
        if lhs != rhs:
            failures.append(
                CaseFailure(f"cross-check S(1) n={n}", str(rhs), str(lhs))
            )
    return _finish(f"identity-consistency(max_n={max_n})", cases, failures)


def verify_brackets(
    level: int,
    xs: Optional[Iterable] = None,
    evaluator: Optional[FabiusEvaluator] = None,
) -> VerificationReport:
    """Exact soundness of the distributional brackets against the evaluator.

    The bracket comes from the CDF of the truncated random series
    sum_{n<=N} 2**-n U_n, independent of the identity tables.  For each
    sample (default j/16) checks lo <= f(x) <= hi and width <= 2**(1-N).
    """
    if evaluator is None:
        evaluator = FabiusEvaluator()
    if xs is None:
        xs = [Fraction(j, 16) for j in range(17)]
    samples = sorted({as_dyadic(x) for x in xs})
    max_width = Fraction(1, 1 << (level - 1))

    failures = []
    cases = 0
    for x in samples:
        value = evaluator.eval_unit(x)
        lo, hi = oracle.bracket(x.as_fraction, level)
        cases += 1
        if not lo <= value <= hi:
            failures.append(
                CaseFailure(
                    f"bracket x={x.as_fraction} N={level}",
                    f"within [{lo}, {hi}]",
                    str(value),
                )
            )
        cases += 1
        if hi - lo > max_width:
            failures.append(
                CaseFailure(
                    f"bracket width x={x.as_fraction} N={level}",
                    f"<= {max_width}",
                    str(hi - lo),
                )
            )
    return _finish(
        f"oracle-brackets(N={level}; CDF of truncated uniform series, "
        "independent of identity tables)",
        cases,
        failures,
    )
