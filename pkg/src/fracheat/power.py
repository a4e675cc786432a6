"""The exponent r of the fractional power, exact when rational."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction


@dataclass(frozen=True)
class RationalPower:
    """An exponent 0 < r < 1.

    Rational exponents carry coprime ``alpha/beta``; irrational-flagged ones
    carry only ``value``. Nothing ever converts one kind into the other.
    """

    kind: str
    value: float
    alpha: int | None = None
    beta: int | None = None

    def __post_init__(self):
        if self.kind not in ("rational", "irrational"):
            raise ValueError(f"unknown kind {self.kind!r}")
        if not 0.0 < self.value < 1.0:
            raise ValueError(f"r must lie in (0, 1), got {self.value}")
        if self.kind == "rational":
            if self.alpha is None or self.beta is None:
                raise ValueError("rational power needs alpha and beta")
            if math.gcd(self.alpha, self.beta) != 1:
                raise ValueError("alpha and beta must be coprime")
            if self.value != self.alpha / self.beta:
                raise ValueError("value does not equal alpha/beta")

    @classmethod
    def fraction(cls, alpha: int, beta: int) -> "RationalPower":
        f = Fraction(alpha, beta)
        return cls("rational", f.numerator / f.denominator, f.numerator, f.denominator)

    @classmethod
    def irrational(cls, value: float) -> "RationalPower":
        return cls("irrational", float(value))

    @classmethod
    def parse(cls, text) -> "RationalPower":
        """``"a/b"`` gives an exact fraction, a decimal gives an irrational flag."""
        if isinstance(text, RationalPower):
            return text
        if isinstance(text, Fraction):
            return cls.fraction(text.numerator, text.denominator)
        if isinstance(text, (int, float)):
            return cls.irrational(text)
        s = str(text).strip()
        if "/" in s:
            a, b = s.split("/", 1)
            return cls.fraction(int(a), int(b))
        return cls.irrational(float(s))

    @property
    def is_rational(self) -> bool:
        return self.kind == "rational"

    @property
    def exact(self) -> Fraction | None:
        return Fraction(self.alpha, self.beta) if self.is_rational else None

    def times_is_integer(self, m: int) -> bool:
        """True iff r*m is an integer."""
        if m == 0:
            return True
        if not self.is_rational:
            return False
        return (m * self.alpha) % self.beta == 0

    def __str__(self):
        if self.is_rational:
            return f"{self.alpha}/{self.beta}"
        return repr(self.value)


def as_power(r) -> RationalPower:
    return RationalPower.parse(r)
