"""Sparse multivariate polynomials with integer coefficients."""

from __future__ import annotations

from fractions import Fraction
from math import lcm
from typing import Iterable, Mapping, Sequence, Tuple

from .errors import ParseError
from .numeric import (
    RatInterval,
    bounded_power_product,
    int_interval_mul,
    int_interval_pow,
    log_height_int,
    sign,
    to_rational,
)

Exponent = Tuple[int, ...]


class MultiPoly:
    """Integer polynomial in ``num_vars`` variables, stored as ``{exponent: coefficient}``.

    Instances are immutable and hashable. Zero coefficients are never stored.
    """

    __slots__ = ("num_vars", "_terms", "_degree", "_hash")

    def __init__(self, num_vars: int, terms: Mapping[Sequence[int], int] | Iterable = ()):
        if num_vars < 0:
            raise ValueError("num_vars must be non-negative")
        items = terms.items() if isinstance(terms, Mapping) else terms
        acc: dict[Exponent, int] = {}
        for exp, coef in items:
            exp = tuple(int(e) for e in exp)
            if len(exp) != num_vars:
                raise ValueError(f"exponent {exp} does not have length {num_vars}")
            if any(e < 0 for e in exp):
                raise ValueError(f"negative exponent in {exp}")
            if isinstance(coef, Fraction):
                if coef.denominator != 1:
                    raise ValueError("coefficients must be integers")
                coef = coef.numerator
            acc[exp] = acc.get(exp, 0) + int(coef)
        self.num_vars = num_vars
        self._terms = tuple(sorted((e, c) for e, c in acc.items() if c != 0))
        self._degree = max((sum(e) for e, _ in self._terms), default=0)
        self._hash = hash((num_vars, self._terms))

    # construction helpers

    @classmethod
    def constant(cls, c: int, num_vars: int) -> "MultiPoly":
        return cls(num_vars, {(0,) * num_vars: c})

    @classmethod
    def variable(cls, index: int, num_vars: int) -> "MultiPoly":
        if not 0 <= index < num_vars:
            raise ValueError(f"variable index {index} out of range")
        exp = [0] * num_vars
        exp[index] = 1
        return cls(num_vars, {tuple(exp): 1})

    @classmethod
    def univariate(cls, coeffs: Sequence[int]) -> "MultiPoly":
        """Build ``sum coeffs[i] * T**i``."""
        return cls(1, {(i,): c for i, c in enumerate(coeffs)})

    # inspection

    @property
    def terms(self) -> dict[Exponent, int]:
        return dict(self._terms)

    def items(self):
        return iter(self._terms)

    def __len__(self):
        return len(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def is_constant(self) -> bool:
        return self._degree == 0

    def coefficient(self, exp: Sequence[int]) -> int:
        return dict(self._terms).get(tuple(exp), 0)

    @property
    def total_degree(self) -> int:
        return self._degree

    @property
    def height(self) -> int:
        """Logarithmic height: largest coefficient bit length."""
        return max((log_height_int(c) for _, c in self._terms), default=0)

    def max_abs_coefficient(self) -> int:
        return max((abs(c) for _, c in self._terms), default=0)

    def degree_and_height(self) -> tuple[int, int]:
        return self._degree, self.height

    # ring operations, only what SLP expansion needs

    def _coerce(self, other) -> "MultiPoly":
        if isinstance(other, MultiPoly):
            if other.num_vars != self.num_vars:
                raise ValueError("polynomials live in different rings")
            return other
        return MultiPoly.constant(int(other), self.num_vars)

    def __add__(self, other):
        o = self._coerce(other)
        return MultiPoly(self.num_vars, list(self._terms) + list(o._terms))

    __radd__ = __add__

    def __neg__(self):
        return MultiPoly(self.num_vars, [(e, -c) for e, c in self._terms])

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        o = self._coerce(other)
        out: dict[Exponent, int] = {}
        for e1, c1 in self._terms:
            for e2, c2 in o._terms:
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = out.get(e, 0) + c1 * c2
        return MultiPoly(self.num_vars, out)

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, MultiPoly):
            return NotImplemented
        return self.num_vars == other.num_vars and self._terms == other._terms

    def __hash__(self):
        return self._hash

    # evaluation

    def _check_point(self, x) -> tuple[Fraction, ...]:
        if len(x) != self.num_vars:
            raise ValueError(f"point has {len(x)} coordinates, polynomial has {self.num_vars} variables")
        return tuple(to_rational(v) for v in x)

    def eval_scaled(self, nums: Sequence[int], q: int) -> int:
        """Return ``q**deg * P(nums / q)`` as an exact integer."""
        d = self._degree
        total = 0
        for exp, c in self._terms:
            t = c * q ** (d - sum(exp))
            for a, e in zip(nums, exp):
                if e:
                    t *= a**e
            total += t
        return total

    def eval_exact(self, x: Sequence) -> Fraction:
        pt = self._check_point(x)
        if not self._terms:
            return Fraction(0)
        q = lcm(*(v.denominator for v in pt)) if pt else 1
        nums = [v.numerator * (q // v.denominator) for v in pt]
        return Fraction(self.eval_scaled(nums, q), q**self._degree)

    def sign_at(self, x: Sequence) -> int:
        pt = self._check_point(x)
        if not self._terms:
            return 0
        q = lcm(*(v.denominator for v in pt)) if pt else 1
        nums = [v.numerator * (q // v.denominator) for v in pt]
        return sign(self.eval_scaled(nums, q))

    def interval_scaled(self, lows: Sequence[int], width: int, q: int) -> tuple[int, int]:
        """Term-wise enclosure of ``q**deg * P`` over ``prod [lows[i], lows[i]+width] / q``."""
        d = self._degree
        lo_sum = hi_sum = 0
        for exp, c in self._terms:
            rng = (c * q ** (d - sum(exp)),) * 2
            for a, e in zip(lows, exp):
                if e:
                    rng = int_interval_mul(rng, int_interval_pow(a, a + width, e))
            lo_sum += rng[0]
            hi_sum += rng[1]
        return lo_sum, hi_sum

    def eval_interval(self, box) -> RatInterval:
        """Enclosure of ``P`` over ``box`` (anything with ``lower`` and ``side``)."""
        if len(box.lower) != self.num_vars:
            raise ValueError("box dimension does not match polynomial")
        lows, width, q = box.scaled()
        lo, hi = self.interval_scaled(lows, width, q)
        den = q**self._degree
        return RatInterval(Fraction(lo, den), Fraction(hi, den))

    # serialization

    def to_json(self) -> dict:
        return {
            "n": self.num_vars,
            "terms": [{"e": list(e), "c": str(c)} for e, c in self._terms],
        }

    @classmethod
    def from_json(cls, obj) -> "MultiPoly":
        try:
            n = int(obj["n"])
            terms = [(tuple(t["e"]), _parse_int(t["c"])) for t in obj["terms"]]
            return cls(n, terms)
        except ParseError:
            raise
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(f"malformed polynomial JSON: {exc}") from exc

    def __repr__(self):
        return f"MultiPoly({self.num_vars}, {str(self)!r})"

    def __str__(self):
        if not self._terms:
            return "0"
        parts = []
        for exp, c in reversed(self._terms):
            mono = "*".join(
                f"X{i + 1}" if e == 1 else f"X{i + 1}^{e}" for i, e in enumerate(exp) if e
            )
            if not mono:
                parts.append(str(c))
            elif c == 1:
                parts.append(mono)
            elif c == -1:
                parts.append("-" + mono)
            else:
                parts.append(f"{c}*{mono}")
        return " + ".join(parts).replace("+ -", "- ")


def _parse_int(text) -> int:
    if isinstance(text, bool):
        raise ParseError("boolean coefficient")
    if isinstance(text, int):
        return text
    try:
        return int(str(text).strip())
    except ValueError as exc:
        raise ParseError(f"malformed integer coefficient {text!r}") from exc


def eval_exact(P: MultiPoly, x: Sequence) -> Fraction:
    return P.eval_exact(x)


def sign_at(P: MultiPoly, x: Sequence) -> int:
    return P.sign_at(x)


def eval_interval(P: MultiPoly, box) -> RatInterval:
    return P.eval_interval(box)


def degree_and_height(P: MultiPoly) -> tuple[int, int]:
    return P.degree_and_height()


def family_cardinality_bound(n: int, d: int, h: int, digit_budget=None) -> int:
    """log2 of the largest possible family size, ``h * (d+1)**n``."""
    if n < 1 or d < 1 or h < 1:
        raise ValueError("family_cardinality_bound needs n >= 1, d >= 1, h >= 1")
    return bounded_power_product(h, d + 1, n, digit_budget)
