"""Exact integer/rational helpers and the combinatorial primitives.

Python ints are already arbitrary precision and :class:`fractions.Fraction`
is always stored in lowest terms with a positive denominator, so both are
used directly rather than wrapped.
"""

from __future__ import annotations

import math
import re
from fractions import Fraction
from typing import Iterable, Union

from .errors import ValidationError

Rational = Fraction

_RATIONAL_RE = re.compile(r"^\s*([+-]?\d+)\s*(?:/\s*(\d+)\s*)?$")


def gcd_many(values: Iterable[int]) -> int:
    """Greatest common divisor of a non-empty list of positive integers."""
    vals = _positive_list(values, "gcd_many")
    return math.gcd(*vals)


def lcm_many(values: Iterable[int]) -> int:
    """Least common multiple of a non-empty list of positive integers."""
    vals = _positive_list(values, "lcm_many")
    return math.lcm(*vals)


def _positive_list(values, name):
    vals = [int(v) for v in values]
    if not vals:
        raise ValidationError(f"{name}: empty list")
    if any(v < 1 for v in vals):
        raise ValidationError(f"{name}: values must be positive integers, got {vals}")
    return vals


def binomial(n: int, k: int) -> int:
    """Exact binomial coefficient; zero when ``k > n``."""
    if n < 0 or k < 0:
        raise ValidationError(f"binomial({n}, {k}): arguments must be nonnegative")
    return math.comb(n, k)


def real_binomial(s: float, K: int) -> float:
    """Number of ways to split a (possibly non-integer) count ``s`` over ``K`` cells.

    Continuous extension of ``binomial(s + K - 1, K - 1)``::

        Gamma(s + K) / (Gamma(K) * Gamma(s + 1))

    Integral ``s`` is routed to the exact integer formula.
    """
    if K < 1:
        raise ValidationError(f"real_binomial: K must be >= 1, got {K}")
    s = float(s)
    if s < 0 or math.isnan(s):
        raise ValidationError(f"real_binomial: s must be >= 0, got {s}")
    if s.is_integer():
        return float(math.comb(int(s) + K - 1, K - 1))
    log_value = math.lgamma(s + K) - math.lgamma(K) - math.lgamma(s + 1)
    return math.exp(log_value)


def as_rational(value: Union[str, int, Fraction]) -> Fraction:
    """Parse ``"g/h"``, ``"g"``, an int or a Fraction into a reduced Fraction.

    Floats are refused: conditionals must be exact.
    """
    if isinstance(value, bool):
        raise ValidationError(f"not a rational: {value!r}")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        m = _RATIONAL_RE.match(value)
        if not m:
            raise ValidationError(f"not a rational string: {value!r}")
        num = int(m.group(1))
        den = int(m.group(2)) if m.group(2) is not None else 1
        if den == 0:
            raise ValidationError(f"zero denominator in {value!r}")
        return Fraction(num, den)
    raise ValidationError(f"not a rational (floats are not accepted): {value!r}")


def format_rational(q: Fraction) -> str:
    """Serialize as ``"g/h"``, or ``"g"`` when the denominator is one."""
    q = Fraction(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"
