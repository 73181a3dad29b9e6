"""
Exponents
Schatten exponents p in (0, inf], with infinity kept as a distinguished value.
"""
import math
from dataclasses import dataclass
from fractions import Fraction

from core.errors import InvalidInputError


@dataclass(frozen=True)
class Exponent:
    """A Schatten exponent. ``value`` is ``math.inf`` for the operator norm."""

    value: float

    def __post_init__(self):
        value = float(self.value)
        if math.isnan(value) or value <= 0:
            raise InvalidInputError(f"exponent must be positive, got {self.value!r}")
        object.__setattr__(self, "value", value)

    @property
    def is_inf(self):
        return math.isinf(self.value)

    @property
    def bar(self):
        """min(1, value)."""
        return min(1.0, self.value)

    @property
    def inv(self):
        """1/value, exactly 0.0 at infinity."""
        return 0.0 if self.is_inf else 1.0 / self.value

    def __str__(self):
        if self.is_inf:
            return "inf"
        frac = Fraction(self.value).limit_denominator(64)
        if float(frac) == self.value and frac.denominator != 1:
            return f"{frac.numerator}/{frac.denominator}"
        return repr(self.value)

    def to_json(self):
        return str(self)


INF = Exponent(math.inf)


def exponent(value):
    """
    Build an Exponent from a number, an Exponent or text.

    Accepts decimals ("0.5"), fractions ("1/2", "3/2") and "inf"/"infinity".
    """
    if isinstance(value, Exponent):
        return value
    if isinstance(value, str):
        text = value.strip().lower()
        if text in ("inf", "infinity", "oo", "∞"):
            return INF
        try:
            return Exponent(float(Fraction(text)))
        except (ValueError, ZeroDivisionError) as e:
            raise InvalidInputError(f"cannot parse exponent {value!r}") from e
    return Exponent(value)


def rate_gap(p, q):
    """1/p - 1/q."""
    return exponent(p).inv - exponent(q).inv
