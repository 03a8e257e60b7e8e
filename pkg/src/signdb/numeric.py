"""Exact rationals, rational-endpoint intervals, heights and the Cauchy root bound.

Rationals are plain :class:`fractions.Fraction` values; they are always kept in
lowest terms with a positive denominator, which is all the canonical form we need.
"""

from __future__ import annotations

import math
import os
import re
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational as _RationalABC
from typing import Union

from .errors import BoundTooLarge, ParseError, ZeroRootPresent

RationalLike = Union[int, Fraction, str]

_RAT_RE = re.compile(r"^\s*(-?\d+)(?:/(\d+))?\s*$")


def to_rational(value) -> Fraction:
    """Coerce ``value`` to an exact :class:`Fraction`.

    Accepts ints, Fractions, ``"p/q"`` strings and floats (converted exactly).
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, (int, _RationalABC)):
        return Fraction(value)
    if isinstance(value, str):
        return parse_rational(value)
    if isinstance(value, float):
        return Fraction(value)
    if hasattr(value, "item"):  # numpy scalar
        return to_rational(value.item())
    raise TypeError(f"cannot interpret {value!r} as a rational")


def parse_rational(text: str) -> Fraction:
    m = _RAT_RE.match(text)
    if m is None:
        raise ParseError(f"malformed rational {text!r}")
    num = int(m.group(1))
    den = int(m.group(2)) if m.group(2) is not None else 1
    if den == 0:
        raise ParseError(f"zero denominator in {text!r}")
    return Fraction(num, den)


def format_rational(r: Fraction) -> str:
    return str(Fraction(r))


def log_height_int(a: int) -> int:
    """Bit length of ``|a|``; zero has height 0."""
    return abs(int(a)).bit_length()


def log_height_rat(r: RationalLike) -> int:
    r = to_rational(r)
    return max(log_height_int(r.numerator), log_height_int(r.denominator))


@dataclass(frozen=True)
class RatInterval:
    """Closed interval ``[lo, hi]`` with exact rational endpoints."""

    lo: Fraction
    hi: Fraction

    def __post_init__(self):
        lo, hi = to_rational(self.lo), to_rational(self.hi)
        if lo > hi:
            raise ValueError(f"empty interval [{lo}, {hi}]")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @classmethod
    def point(cls, value: RationalLike) -> "RatInterval":
        v = to_rational(value)
        return cls(v, v)

    @staticmethod
    def _coerce(other) -> "RatInterval":
        if isinstance(other, RatInterval):
            return other
        return RatInterval.point(other)

    def __add__(self, other):
        o = self._coerce(other)
        return RatInterval(self.lo + o.lo, self.hi + o.hi)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        return RatInterval(self.lo - o.hi, self.hi - o.lo)

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __neg__(self):
        return RatInterval(-self.hi, -self.lo)

    def __mul__(self, other):
        o = self._coerce(other)
        prods = (self.lo * o.lo, self.lo * o.hi, self.hi * o.lo, self.hi * o.hi)
        return RatInterval(min(prods), max(prods))

    __rmul__ = __mul__

    def __pow__(self, k: int):
        lo, hi = int_interval_pow(self.lo, self.hi, k)
        return RatInterval(lo, hi)

    def __contains__(self, value) -> bool:
        v = to_rational(value)
        return self.lo <= v <= self.hi

    def contains_zero(self) -> bool:
        return self.lo <= 0 <= self.hi

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    def __repr__(self):
        return f"RatInterval[{self.lo}, {self.hi}]"


def interval_ops(a: RatInterval, b: RatInterval, op: str) -> RatInterval:
    if op in ("+", "add"):
        return a + b
    if op in ("-", "sub"):
        return a - b
    if op in ("*", "mul"):
        return a * b
    raise ValueError(f"unsupported interval operation {op!r}")


def int_interval_pow(lo, hi, k: int):
    """Exact range of ``t**k`` for ``t`` in ``[lo, hi]`` (works for ints and Fractions)."""
    if k == 0:
        return 1, 1
    if lo >= 0:
        return lo**k, hi**k
    if hi <= 0:
        if k % 2 == 0:
            return hi**k, lo**k
        return lo**k, hi**k
    if k % 2 == 0:
        return 0, max(lo**k, hi**k)
    return lo**k, hi**k


def int_interval_mul(a, b):
    p = (a[0] * b[0], a[0] * b[1], a[1] * b[0], a[1] * b[1])
    return min(p), max(p)


def sign(value) -> int:
    return (value > 0) - (value < 0)


def cauchy_lower_bound(poly) -> Fraction:
    """Return ``1/(H+1)``, a strict lower bound on the magnitude of every real root.

    ``H`` is the largest absolute coefficient of the univariate polynomial ``poly``.
    """
    if poly.num_vars != 1:
        raise ValueError("cauchy_lower_bound needs a univariate polynomial")
    if poly.is_zero():
        raise ValueError("the zero polynomial has no root bound")
    if poly.coefficient((0,)) == 0:
        raise ZeroRootPresent("constant term is zero, so 0 is a root")
    return Fraction(1, poly.max_abs_coefficient() + 1)


DEFAULT_DIGIT_BUDGET = 512


def bounded_power_product(factor: int, base: int, exponent: int, digit_budget=None) -> int:
    """Exact ``factor * base**exponent``, refusing results beyond ``digit_budget`` decimal digits."""
    if digit_budget is None:
        digit_budget = int(os.environ.get("SIGNDB_DIGIT_BUDGET", DEFAULT_DIGIT_BUDGET))
    if factor > 0 and base > 1:
        digits = exponent * math.log10(base) + math.log10(factor)
        if digits > digit_budget:
            raise BoundTooLarge(
                f"{factor}*{base}^{exponent} has about {digits:.0f} digits "
                f"(budget {digit_budget})"
            )
    return factor * base**exponent
