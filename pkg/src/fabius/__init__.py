"""Exact arithmetic for the Fabius function.

The Fabius function is the unique continuous f on [0, oo) satisfying

    f(x) + f(1 - x) = 1  on [0, 1]       and       f(x) = int_0^(2x) f(t) dt.

It is infinitely differentiable yet nowhere analytic, rises from
f(0) = 0 to f(1) = 1, and continues past 1 as a repeated bell over
[2m, 2m+2] whose sign follows the Thue-Morse sequence.  At every dyadic
rational k/2**m its value is an ordinary rational number, and this
package computes that value exactly:

>>> from fabius import eval_unit
>>> eval_unit("5/16")
Fraction(305857, 2073600)

Highlights:

* ``eval_unit`` / ``eval_extended``: exact values on [0, 1] and [0, oo).
* ``approx_eval``: certified approximation at any nonnegative rational,
  with an exact error bound from the Lipschitz estimate |f'| <= 2.
* ``IdentityTable``: the scaled polynomial identities driving the
  evaluator, generated by recurrence and serializable to JSON.
* ``bracket`` / ``truncated_cdf``: an independent oracle squeezing f
  between exact piecewise-polynomial CDF values of a truncated random
  series, with no shared machinery with the identity route.
* ``verify_golden`` / ``verify_identities`` / ``verify_brackets``:
  exact self-checks returning structured reports.

All numbers are ``fractions.Fraction``; nothing is ever rounded except
in explicitly decimal display helpers.
"""

from .rationals import (
    DomainError,
    DyadicRational,
    ExactRational,
    LeadingBitSplit,
    as_dyadic,
    exact_fraction,
    is_power_of_two,
    normalize_dyadic,
    split_leading_bit,
    to_decimal_string,
)
from .identities import (
    CacheFormatError,
    DiffIdentity,
    IdentityTable,
    SumIdentity,
    eval_diff,
    eval_sum,
    small_value_constant,
)
from .evaluator import (
    ApproxResult,
    FabiusEvaluator,
    FabiusValue,
    approx_eval,
    default_evaluator,
    eval_extended,
    eval_reflected,
    eval_unit,
    thue_morse,
    values_at_denominator,
)
from .oracle import (
    MonteCarloEstimate,
    PiecewisePolynomialCDF,
    bracket,
    cdf_of_uniform_sum,
    cdf_value,
    monte_carlo_estimate,
    truncated_cdf,
)
from .verify import (
    GOLDEN_VALUES,
    CaseFailure,
    VerificationReport,
    verify_brackets,
    verify_golden,
    verify_identities,
)

__version__ = "0.1.0"

__all__ = [
    "ApproxResult",
    "CacheFormatError",
    "CaseFailure",
    "DiffIdentity",
    "DomainError",
    "DyadicRational",
    "ExactRational",
    "FabiusEvaluator",
    "FabiusValue",
    "GOLDEN_VALUES",
    "IdentityTable",
    "LeadingBitSplit",
    "MonteCarloEstimate",
    "PiecewisePolynomialCDF",
    "SumIdentity",
    "VerificationReport",
    "approx_eval",
    "as_dyadic",
    "bracket",
    "cdf_of_uniform_sum",
    "cdf_value",
    "default_evaluator",
    "eval_diff",
    "eval_extended",
    "eval_reflected",
    "eval_sum",
    "eval_unit",
    "exact_fraction",
    "is_power_of_two",
    "monte_carlo_estimate",
    "normalize_dyadic",
    "small_value_constant",
    "split_leading_bit",
    "thue_morse",
    "to_decimal_string",
    "truncated_cdf",
    "values_at_denominator",
    "verify_brackets",
    "verify_golden",
    "verify_identities",
    "__version__",
]
