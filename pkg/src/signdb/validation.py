"""Input validation helpers shared by the estimators and the CLI."""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

from .errors import ParseError
from .numeric import parse_rational, to_rational
from .poly import MultiPoly


def parse_point(text: str) -> tuple[Fraction, ...]:
    """Parse ``"1/3,2/5"`` into a tuple of Fractions."""
    parts = [p for p in text.split(",")]
    if not text.strip() or any(not p.strip() for p in parts):
        raise ParseError(f"malformed point {text!r}")
    return tuple(parse_rational(p) for p in parts)


def check_point(x, n: int | None = None) -> tuple[Fraction, ...]:
    if isinstance(x, str):
        pt = parse_point(x)
    else:
        try:
            pt = tuple(to_rational(v) for v in x)
        except TypeError as exc:
            raise ParseError(str(exc)) from exc
    if n is not None and len(pt) != n:
        raise ValueError(f"expected {n} coordinates, got {len(pt)}")
    return pt


def check_points(X, n: int | None = None) -> list[tuple[Fraction, ...]]:
    """Coerce a batch of points (nested sequences, 2-D arrays or strings) to exact tuples."""
    if hasattr(X, "ndim") and X.ndim == 1:
        X = [X]
    if isinstance(X, str):
        X = [X]
    pts = [check_point(x, n) for x in X]
    if n is None and pts and len({len(p) for p in pts}) != 1:
        raise ValueError("points have inconsistent dimensions")
    return pts


def check_family(family: Sequence) -> tuple[MultiPoly, ...]:
    """Accept MultiPolys or their JSON dicts; all must share one variable count."""
    out = []
    for P in family:
        out.append(P if isinstance(P, MultiPoly) else MultiPoly.from_json(P))
    if not out:
        raise ValueError("empty family")
    if len({P.num_vars for P in out}) != 1:
        raise ValueError("family members have different numbers of variables")
    return tuple(out)
