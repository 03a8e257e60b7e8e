"""Point location and sign-condition queries against a :class:`SignDatabase`."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

from .atlas import SignDatabase
from .errors import CertificateError, OutOfDomain, OutsideRegion
from .numeric import sign, to_rational
from .poly import MultiPoly
from .slp import slp_eval, slp_from_poly


@dataclass(frozen=True)
class QueryStats:
    comparisons: int = 0
    arith_ops: int = 0

    def __add__(self, other: "QueryStats") -> "QueryStats":
        return QueryStats(self.comparisons + other.comparisons, self.arith_ops + other.arith_ops)

    def to_json(self) -> dict:
        return {"comparisons": self.comparisons, "arith_ops": self.arith_ops}


def _as_point(x, n) -> tuple:
    pt = tuple(to_rational(v) for v in x)
    if len(pt) != n:
        raise ValueError(f"expected a point with {n} coordinates, got {len(pt)}")
    if any(v < 0 or v > 1 for v in pt):
        raise OutOfDomain(f"point {[str(v) for v in pt]} is outside [0,1]^{n}")
    return pt


def _locate(db: SignDatabase, pt) -> tuple[tuple, int]:
    comparisons = 0
    if db.mode == "uniform":
        m = 1 << db.grid_log2
        idx = []
        for v in pt:
            # first i with v in [i/m, (i+1)/m]: the lower cell owns shared faces
            lo, hi = 0, m - 1
            while lo < hi:
                mid = (lo + hi) // 2
                comparisons += 1
                if v <= Fraction(mid + 1, m):
                    hi = mid
                else:
                    lo = mid + 1
            idx.append(lo)
        return tuple(idx), comparisons
    node = db.tree
    path = []
    lower = [Fraction(0)] * db.n
    side = Fraction(1)
    while not node.is_leaf:
        side /= 2
        child = 0
        for j, v in enumerate(pt):
            comparisons += 1
            if v > lower[j] + side:
                child |= 1 << j
                lower[j] += side
        path.append(child)
        node = node.children[child]
    return tuple(path), comparisons


def locate(db: SignDatabase, x: Sequence) -> tuple[tuple, QueryStats]:
    """Cell containing ``x`` and the number of comparisons spent finding it.

    Uniform cells are addressed by their grid index, adaptive leaves by the
    path of child indices from the root.
    """
    pt = _as_point(x, db.n)
    cell, comparisons = _locate(db, pt)
    return cell, QueryStats(comparisons, 0)


@lru_cache(maxsize=256)
def _poly_program(P: MultiPoly):
    return slp_from_poly(P)


def delta_eval_counted(delta, pt) -> tuple[Fraction, int]:
    """Exact ``delta(pt)`` together with the arithmetic it costs."""
    if isinstance(delta, MultiPoly):
        (val,), ops = slp_eval(_poly_program(delta), pt)
        return val, ops
    return delta.eval_counted(pt)


def _check_delta(db, pt) -> int:
    val, ops = delta_eval_counted(db.delta, pt)
    if val < 1:
        raise OutsideRegion(f"delta({[str(v) for v in pt]}) = {val} < 1")
    return ops


def sign_query(
    db: SignDatabase, x: Sequence, programs=None, verify_delta: bool = False
) -> tuple[tuple, QueryStats]:
    """Sign vector of the family at ``x``.

    Only the members recorded as cutting the located cell are evaluated; the
    other signs come from the cell record. A cell certified empty carries no
    sign information, so if one is reached without ``verify_delta`` (the caller
    broke the ``delta(x) >= 1`` precondition) every member is evaluated.
    """
    pt = _as_point(x, db.n)
    programs = db.resolve_programs(programs)
    ops = _check_delta(db, pt) if verify_delta else 0
    cell, comparisons = _locate(db, pt)
    rec = db.record(cell)
    signs = [0] * db.s
    if rec.empty_region:
        if verify_delta:
            raise CertificateError(f"cell {cell} certified empty but contains a delta-point")
        todo = range(db.s)
    else:
        for i, s in rec.fixed_signs:
            signs[i] = s
        todo = rec.cutting
    for i in todo:
        (val,), cost = slp_eval(programs[i], pt)
        ops += cost
        signs[i] = sign(val)
    return tuple(signs), QueryStats(comparisons, ops)


def naive_signs(db: SignDatabase, x: Sequence) -> tuple:
    pt = _as_point(x, db.n)
    return tuple(P.sign_at(pt) for P in db.family)


def bench(db: SignDatabase, points: Sequence, programs=None, verify_delta: bool = False) -> dict:
    """Per-query and aggregate costs, with the evaluate-everything baseline for contrast."""
    programs = db.resolve_programs(programs)
    naive = sum(p.length for p in programs)
    per_query = []
    total = QueryStats()
    for x in points:
        _, st = sign_query(db, x, programs, verify_delta)
        per_query.append(st.to_json())
        total = total + st
    count = len(per_query)
    return {
        "queries": count,
        "comparisons_total": total.comparisons,
        "arith_ops_total": total.arith_ops,
        "max_comparisons": max((q["comparisons"] for q in per_query), default=0),
        "max_arith_ops": max((q["arith_ops"] for q in per_query), default=0),
        "naive_ops_per_query": naive,
        "naive_ops_total": naive * count,
        "per_query": per_query,
    }
