"""Rational hypercubes, delta-restricted regions and certified cut decisions.

``decide_cut`` answers whether a polynomial changes sign on
``R_delta = {x in box : delta(x) >= 1}`` by recursive subdivision with exact
interval enclosures. A conclusive answer is always a certificate:

* ``Cuts`` carries two exact points of ``R_delta`` with different signs;
* ``ConstSign`` means every subcell was either excluded (``sup delta < 1``) or
  had an enclosure of ``P`` on one side of zero;
* ``EmptyRegion`` means every subcell was excluded.

When the depth limit runs out first the answer is ``Undecided``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from math import lcm
from typing import Optional, Sequence, Union

import numpy as np

from .errors import ParseError
from .numeric import format_rational, log_height_rat, sign, to_rational
from .poly import MultiPoly

DEFAULT_DEPTH_LIMIT = 10


@dataclass(frozen=True)
class Box:
    """Closed hypercube ``prod [lower_i, lower_i + side]``."""

    lower: tuple
    side: Fraction

    def __post_init__(self):
        object.__setattr__(self, "lower", tuple(to_rational(v) for v in self.lower))
        object.__setattr__(self, "side", to_rational(self.side))
        if self.side <= 0:
            raise ValueError("box side must be positive")

    @classmethod
    def unit(cls, n: int) -> "Box":
        return cls((Fraction(0),) * n, Fraction(1))

    @property
    def dim(self) -> int:
        return len(self.lower)

    @property
    def upper(self) -> tuple:
        return tuple(a + self.side for a in self.lower)

    @property
    def log_height(self) -> int:
        return max((log_height_rat(v) for v in self.lower + self.upper), default=0)

    def scaled(self) -> tuple[list[int], int, int]:
        """Integers ``(lows, width, q)`` with ``lower_i = lows[i]/q`` and ``side = width/q``."""
        q = lcm(self.side.denominator, *(a.denominator for a in self.lower))
        return [a.numerator * (q // a.denominator) for a in self.lower], self.side.numerator * (
            q // self.side.denominator
        ), q

    def contains(self, x: Sequence) -> bool:
        return all(a <= to_rational(v) <= a + self.side for a, v in zip(self.lower, x)) and len(
            x
        ) == self.dim

    def center(self) -> tuple:
        h = self.side / 2
        return tuple(a + h for a in self.lower)

    def corners(self) -> list[tuple]:
        return [
            tuple(a + (self.side if (c >> j) & 1 else 0) for j, a in enumerate(self.lower))
            for c in range(1 << self.dim)
        ]

    def child(self, index: int) -> "Box":
        h = self.side / 2
        return Box(
            tuple(a + (h if (index >> j) & 1 else 0) for j, a in enumerate(self.lower)), h
        )

    def subdivide(self) -> list["Box"]:
        return [self.child(c) for c in range(1 << self.dim)]

    def to_json(self) -> dict:
        return {"lower": [format_rational(a) for a in self.lower], "side": format_rational(self.side)}

    @classmethod
    def from_json(cls, obj) -> "Box":
        try:
            return cls(tuple(to_rational(v) for v in obj["lower"]), to_rational(obj["side"]))
        except ParseError:
            raise
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(f"malformed box JSON: {exc}") from exc


def box_subdivide(box: Box) -> list[Box]:
    return box.subdivide()


def _is_poly(delta) -> bool:
    return isinstance(delta, MultiPoly)


class DeltaCheck:
    """Memoised membership tests against ``delta >= 1``.

    Shared between many ``decide_cut`` calls of one build so that the (possibly
    expensive) delta enclosures are computed once per box.
    """

    def __init__(self, delta):
        self.delta = delta
        self.always: Optional[bool] = None
        if _is_poly(delta) and delta.is_constant():
            self.always = delta.eval_exact((0,) * delta.num_vars) >= 1
        self._box_cache: dict = {}
        self._pt_cache: dict = {}

    def excludes(self, lows, width, q) -> bool:
        """True when ``sup delta < 1`` is certified on the scaled box."""
        if self.always is not None:
            return not self.always
        key = (tuple(lows), width, q)
        hit = self._box_cache.get(key)
        if hit is None:
            d = self.delta
            if _is_poly(d):
                hit = d.interval_scaled(lows, width, q)[1] < q**d.total_degree
            else:
                box = Box(tuple(Fraction(a, q) for a in lows), Fraction(width, q))
                hit = d.eval_interval(box).hi < 1
            self._box_cache[key] = hit
        return hit

    def admits(self, nums, q) -> bool:
        """True when the point ``nums/q`` satisfies ``delta >= 1`` exactly."""
        if self.always is not None:
            return self.always
        key = (tuple(nums), q)
        hit = self._pt_cache.get(key)
        if hit is None:
            d = self.delta
            if _is_poly(d):
                hit = d.eval_scaled(nums, q) >= q**d.total_degree
            else:
                hit = d.eval_exact(tuple(Fraction(a, q) for a in nums)) >= 1
            self._pt_cache[key] = hit
        return hit


@dataclass(frozen=True)
class RegionSpec:
    """A box together with the delta evaluator restricting it."""

    box: Box
    delta: object = None
    check: DeltaCheck = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if self.delta is None:
            object.__setattr__(self, "delta", MultiPoly.constant(1, self.box.dim))
        if self.delta.num_vars != self.box.dim:
            raise ValueError("delta and box dimensions differ")
        if self.check is None:
            object.__setattr__(self, "check", DeltaCheck(self.delta))

    def with_box(self, box: Box) -> "RegionSpec":
        return RegionSpec(box, self.delta, self.check)

    def contains(self, x) -> bool:
        return self.box.contains(x) and self.delta.eval_exact(x) >= 1


@dataclass(frozen=True)
class Cuts:
    witness_a: tuple
    witness_b: tuple
    signs: tuple
    kind = "cuts"

    def to_json(self):
        return {
            "status": self.kind,
            "witness_a": [format_rational(v) for v in self.witness_a],
            "witness_b": [format_rational(v) for v in self.witness_b],
            "signs": list(self.signs),
        }


@dataclass(frozen=True)
class ConstSign:
    sign: int
    kind = "const_sign"

    def to_json(self):
        return {"status": self.kind, "sign": self.sign}


@dataclass(frozen=True)
class EmptyRegion:
    kind = "empty_region"

    def to_json(self):
        return {"status": self.kind}


@dataclass(frozen=True)
class Undecided:
    kind = "undecided"

    def to_json(self):
        return {"status": self.kind}


CutStatus = Union[Cuts, ConstSign, EmptyRegion, Undecided]


def _sample_points(lows, width, q):
    """Center first, then corners, as ``(nums, denominator)`` pairs."""
    n = len(lows)
    yield [2 * a + width for a in lows], 2 * q
    for c in range(1 << n):
        yield [a + (width if (c >> j) & 1 else 0) for j, a in enumerate(lows)], q


def decide_cut(
    P: MultiPoly, region: RegionSpec, depth_limit: int = DEFAULT_DEPTH_LIMIT
) -> CutStatus:
    """Certified decision whether ``P`` changes sign on ``region``."""
    if depth_limit < 0:
        raise ValueError("depth_limit must be non-negative")
    if P.num_vars != region.box.dim:
        raise ValueError("polynomial and region dimensions differ")
    check = region.check
    lows, width, q = region.box.scaled()
    d = P.total_degree
    witnesses: dict[int, tuple] = {}
    certified: set[int] = set()
    level = [lows]
    depth = 0
    while True:
        pending = []
        for cell in level:
            if check.excludes(cell, width, q):
                continue
            if P.is_zero():
                lo = hi = 0
                s = 0
            else:
                lo, hi = P.interval_scaled(cell, width, q)
                s = 1 if lo > 0 else -1 if hi < 0 else None
            if s is not None:
                certified.add(s)
                if s in witnesses:
                    continue
            for nums, den in _sample_points(cell, width, q):
                if not check.admits(nums, den):
                    continue
                ps = sign(P.eval_scaled(nums, den)) if s is None else s
                if ps not in witnesses:
                    witnesses[ps] = tuple(Fraction(a, den) for a in nums)
                if s is not None:
                    break
            if len(witnesses) > 1:
                # prefer strictly opposite witnesses over a zero
                sa, sb = (-1, 1) if -1 in witnesses and 1 in witnesses else sorted(witnesses)[:2]
                return Cuts(witnesses[sa], witnesses[sb], (sa, sb))
            if s is None:
                pending.append(cell)
        if not pending:
            break
        if depth == depth_limit:
            return Undecided()
        depth += 1
        # children in bit-pattern order; width halves, so rescale the grid
        q *= 2
        level = [
            [2 * a + (width if (c >> j) & 1 else 0) for j, a in enumerate(cell)]
            for cell in pending
            for c in range(1 << len(cell))
        ]
    if not certified:
        return EmptyRegion()
    if len(certified) == 1:
        return ConstSign(certified.pop())
    # opposite signs certified on cells that never produced a delta-point
    return Undecided()


def region_status(region: RegionSpec, depth_limit: int = DEFAULT_DEPTH_LIMIT) -> str:
    """``"empty"`` (every subcell excluded), ``"nonempty"`` (an exact delta-point
    was found) or ``"unknown"``."""
    check = region.check
    if check.always is not None:
        return "nonempty" if check.always else "empty"
    lows, width, q = region.box.scaled()
    level = [lows]
    for depth in range(depth_limit + 1):
        pending = []
        for cell in level:
            if check.excludes(cell, width, q):
                continue
            if any(check.admits(nums, den) for nums, den in _sample_points(cell, width, q)):
                return "nonempty"
            pending.append(cell)
        if not pending:
            return "empty"
        if depth == depth_limit:
            break
        q *= 2
        level = [
            [2 * a + (width if (c >> j) & 1 else 0) for j, a in enumerate(cell)]
            for cell in pending
            for c in range(1 << len(cell))
        ]
    return "unknown"


_INT64_SAFE = 1 << 62


def _grid_values(P: MultiPoly, axes: list[np.ndarray], q: int) -> np.ndarray:
    """``q**deg * P`` on the tensor grid spanned by integer ``axes`` (exact)."""
    n = len(axes)
    shape = tuple(len(a) for a in axes)
    d = P.total_degree
    biggest = max([q] + [int(np.abs(a).max()) for a in axes])
    bound = sum(abs(c) for _, c in P.items()) * biggest**d
    dtype = np.int64 if bound < _INT64_SAFE else object
    out = np.zeros(shape, dtype=dtype)
    for exp, c in P.items():
        term = np.full(shape, c * q ** (d - sum(exp)), dtype=dtype)
        for j, e in enumerate(exp):
            if e:
                ax = axes[j].astype(dtype) ** e
                term = term * ax.reshape([-1 if i == j else 1 for i in range(n)])
        out = out + term
    return out


def oracle_cut_sample(P: MultiPoly, region: RegionSpec, grid_log2: int) -> set[int]:
    """Signs of ``P`` observed on the grid of spacing ``side / 2**grid_log2`` inside ``R_delta``.

    Brute-force and independent of ``decide_cut``; it can detect cuts but never
    certify their absence.
    """
    if grid_log2 < 1:
        raise ValueError("grid_log2 must be >= 1")
    lows, width, q = region.box.scaled()
    steps = 1 << grid_log2
    q *= steps
    axes = [np.array([a * steps + t * width for t in range(steps + 1)], dtype=object) for a in lows]
    axes = [ax.astype(np.int64) if max(abs(int(v)) for v in ax) < _INT64_SAFE else ax for ax in axes]
    delta = region.delta
    if _is_poly(delta):
        mask = _grid_values(delta, axes, q) >= q**delta.total_degree
    else:
        mask = np.zeros(tuple(len(a) for a in axes), dtype=bool)
        for idx in product(*(range(len(a)) for a in axes)):
            pt = tuple(Fraction(int(axes[j][i]), q) for j, i in enumerate(idx))
            mask[idx] = delta.eval_exact(pt) >= 1
    if not mask.any():
        return set()
    vals = _grid_values(P, axes, q)[mask]
    if vals.dtype == object:
        return {sign(int(v)) for v in vals}
    return {int(s) for s in np.unique(np.sign(vals))}
