"""Consistency queries for ``G(X) = 0, H(u, X) = 0`` over a finite list of integer zeros.

The database is the sign database of the specialised family
``{H(U, xi) : xi a zero of G}`` over ``[0,1]^m``; ``u`` is consistent exactly
when some member vanishes at ``u``.

The bundled instance uses ``G_i = X_i^2 - X_i`` (zeros: the boolean cube), the
power-sum program ``H`` with ``H(U, [j]) = sum_k U_k^j`` and a product of
generalised Vandermonde determinants as ``delta``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from math import comb
from typing import Optional, Sequence

from .atlas import SignDatabase, build_adaptive, build_uniform
from .engine import QueryStats, _as_point, _check_delta, _locate
from .errors import BudgetError, CertificateError, ParseError
from .numeric import RatInterval, int_interval_mul, int_interval_pow, to_rational
from .poly import MultiPoly
from .region import DEFAULT_DEPTH_LIMIT, Box, RegionSpec
from .slp import Slp, bits_of, slp_eval, slp_specialize, slp_to_poly

DEFAULT_ZERO_CAP = 16
MAX_DET_SIZE = 4
DEFAULT_SUBSET_BUDGET = 50_000


@dataclass(frozen=True)
class ZeroList:
    zeros: tuple

    def __post_init__(self):
        zs = tuple(tuple(int(v) for v in z) for z in self.zeros)
        if len(set(zs)) != len(zs):
            raise ValueError("zeros must be distinct")
        if zs and len({len(z) for z in zs}) != 1:
            raise ValueError("zeros must all have the same length")
        object.__setattr__(self, "zeros", zs)

    @property
    def n(self) -> int:
        return len(self.zeros[0]) if self.zeros else 0

    def __len__(self):
        return len(self.zeros)

    def __iter__(self):
        return iter(self.zeros)

    def verify(self, system: Sequence[MultiPoly]) -> None:
        """Raise ``ValueError`` unless every zero annihilates every polynomial of ``system``."""
        for z in self.zeros:
            for G in system:
                if G.eval_exact(z) != 0:
                    raise ValueError(f"{z} is not a zero of {G}")


def boolean_system(n: int) -> list[MultiPoly]:
    """``X_i^2 - X_i`` for ``i = 1..n``."""
    out = []
    for i in range(n):
        sq = [0] * n
        sq[i] = 2
        lin = [0] * n
        lin[i] = 1
        out.append(MultiPoly(n, {tuple(sq): 1, tuple(lin): -1}))
    return out


def boolean_zeros(n: int, cap: int = DEFAULT_ZERO_CAP) -> ZeroList:
    """All of ``{0,1}^n`` in counting order, coordinate 1 holding the lowest bit."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if n > cap:
        raise BudgetError(f"2^{n} zeros exceed the cap of 2^{cap}")
    zl = ZeroList(tuple(bits_of(j, n) for j in range(1 << n)))
    zl.verify(boolean_system(n))
    return zl


# ---------------------------------------------------------------------------
# generalised Vandermonde delta


def _cofactor_det(M, add, sub, mul):
    if len(M) == 1:
        return M[0][0]
    acc = None
    for c in range(len(M)):
        minor = [row[:c] + row[c + 1 :] for row in M[1:]]
        term = mul(M[0][c], _cofactor_det(minor, add, sub, mul))
        if acc is None:
            acc = term
        elif c % 2:
            acc = sub(acc, term)
        else:
            acc = add(acc, term)
    return acc


class _Counter:
    def __init__(self):
        self.ops = 0

    def add(self, a, b):
        self.ops += 1
        return a + b

    def sub(self, a, b):
        self.ops += 1
        return a - b

    def mul(self, a, b):
        self.ops += 1
        return a * b


@dataclass(frozen=True)
class DeltaDetProduct:
    """``prod det(U_t^(i_s - 1))`` over all ``1 <= i_1 < ... < i_r <= top``, ``1 <= r <= m``.

    The ``r x r`` factor uses ``U_1..U_r``. Never expanded symbolically.
    """

    m: int
    top: int

    def __post_init__(self):
        if not 1 <= self.m <= MAX_DET_SIZE:
            raise BudgetError(f"m = {self.m} outside the supported range 1..{MAX_DET_SIZE}")
        if self.top < 1:
            raise ValueError("top must be >= 1")
        count = sum(comb(self.top, r) for r in range(1, self.m + 1))
        if count > DEFAULT_SUBSET_BUDGET:
            raise BudgetError(f"{count} determinant factors exceed the budget")

    @classmethod
    def for_boolean(cls, m: int, n: int) -> "DeltaDetProduct":
        return cls(m, 1 << n)

    @property
    def num_vars(self) -> int:
        return self.m

    def subsets(self):
        for r in range(1, self.m + 1):
            yield from combinations(range(1, self.top + 1), r)

    def _powers(self, u, mul):
        table = []
        for t in range(self.m):
            row = [Fraction(1), u[t]]
            for _ in range(2, self.top):
                row.append(mul(row[-1], u[t]))
            table.append(row[: self.top])
        return table

    def factor(self, u: Sequence, subset: Sequence[int]) -> Fraction:
        u = tuple(to_rational(v) for v in u)
        M = [[u[t] ** (i - 1) for t in range(len(subset))] for i in subset]
        return _cofactor_det(M, lambda a, b: a + b, lambda a, b: a - b, lambda a, b: a * b)

    def eval_counted(self, u: Sequence) -> tuple[Fraction, int]:
        if len(u) != self.m:
            raise ValueError(f"expected {self.m} coordinates")
        u = tuple(to_rational(v) for v in u)
        ctr = _Counter()
        pw = self._powers(u, ctr.mul)
        acc = None
        for sub in self.subsets():
            M = [[pw[t][i - 1] for t in range(len(sub))] for i in sub]
            f = _cofactor_det(M, ctr.add, ctr.sub, ctr.mul)
            acc = f if acc is None else ctr.mul(acc, f)
        return acc, ctr.ops

    def eval_exact(self, u: Sequence) -> Fraction:
        return self.eval_counted(u)[0]

    def eval_interval(self, box: Box) -> RatInterval:
        """Enclosure over ``box`` by interval cofactor expansion of each factor."""
        if box.dim != self.m:
            raise ValueError("box dimension does not match delta")
        lows, width, q = box.scaled()
        # entry U_t^e lies in pw[t][e] / q^e; every term of a factor shares the
        # denominator q^(sum of row exponents), so the numerators add directly
        pw = [[int_interval_pow(a, a + width, e) for e in range(self.top)] for a in lows]
        lo = hi = 1
        exp_total = 0
        for sub in self.subsets():
            M = [[pw[t][i - 1] for t in range(len(sub))] for i in sub]
            f = _cofactor_det(
                M,
                lambda a, b: (a[0] + b[0], a[1] + b[1]),
                lambda a, b: (a[0] - b[1], a[1] - b[0]),
                int_interval_mul,
            )
            lo, hi = int_interval_mul((lo, hi), f)
            exp_total += sum(i - 1 for i in sub)
        den = q**exp_total
        return RatInterval(Fraction(lo, den), Fraction(hi, den))

    def to_json(self) -> dict:
        return {"vandermonde": {"m": self.m, "top": self.top}}

    @classmethod
    def from_json(cls, obj) -> "DeltaDetProduct":
        try:
            v = obj["vandermonde"]
            return cls(int(v["m"]), int(v["top"]))
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(f"malformed vandermonde descriptor: {exc}") from exc


def vandermonde_delta_eval(u_or_box, spec: DeltaDetProduct):
    """Exact value at a point, or an enclosure when given a :class:`Box`."""
    if isinstance(u_or_box, Box):
        return spec.eval_interval(u_or_box)
    return spec.eval_exact(u_or_box)


# ---------------------------------------------------------------------------
# consistency database and query


def specialize_family(H: Slp, zeros: ZeroList) -> tuple[tuple, tuple]:
    """Programs ``H(U, xi)`` for each zero ``xi`` and their expanded polynomials."""
    zeros = zeros if isinstance(zeros, ZeroList) else ZeroList(tuple(zeros))
    if not len(zeros):
        raise ValueError("the zero list is empty, so the family would be vacuous")
    if H.num_inputs <= zeros.n:
        raise ValueError(f"H has {H.num_inputs} inputs; need more than the {zeros.n} X-inputs")
    programs = tuple(slp_specialize(H, xi) for xi in zeros)
    family = tuple(slp_to_poly(p)[0] for p in programs)
    return programs, family


def build_consistency_db(
    H: Slp,
    zeros,
    delta=None,
    mode: str = "adaptive",
    k: Optional[int] = None,
    max_depth: int = 12,
    depth_limit: int = DEFAULT_DEPTH_LIMIT,
    grid_log2: int = 4,
    threads: int = 1,
) -> SignDatabase:
    programs, family = specialize_family(H, zeros)
    if mode == "adaptive":
        return build_adaptive(family, delta, k, max_depth, depth_limit, threads, programs=programs)
    if mode == "uniform":
        return build_uniform(family, delta, grid_log2, depth_limit, k, programs=programs)
    raise ValueError(f"unknown mode {mode!r}")


def consistency_query(
    db: SignDatabase, u: Sequence, programs=None, verify_delta: bool = False
) -> tuple[bool, QueryStats]:
    """Whether ``H(u, xi) = 0`` for some zero ``xi``.

    A recorded fixed sign of 0 answers immediately; otherwise only the cutting
    programs are run, stopping at the first one that vanishes.
    """
    pt = _as_point(u, db.n)
    programs = db.resolve_programs(programs)
    ops = _check_delta(db, pt) if verify_delta else 0
    cell, comparisons = _locate(db, pt)
    rec = db.record(cell)
    if rec.empty_region:
        if verify_delta:
            raise CertificateError(f"cell {cell} certified empty but contains a delta-point")
        todo = range(db.s)
    else:
        if any(s == 0 for _, s in rec.fixed_signs):
            return True, QueryStats(comparisons, ops)
        todo = rec.cutting
    for i in todo:
        (val,), cost = slp_eval(programs[i], pt)
        ops += cost
        if val == 0:
            return True, QueryStats(comparisons, ops)
    return False, QueryStats(comparisons, ops)


def brute_force_consistent(H: Slp, zeros, u: Sequence) -> bool:
    u = [to_rational(v) for v in u]
    return any(slp_eval(H, u + [Fraction(v) for v in xi])[0][0] == 0 for xi in zeros)


def _rank(rows) -> int:
    M = [list(r) for r in rows]
    rank = 0
    cols = len(M[0]) if M else 0
    for c in range(cols):
        piv = next((r for r in range(rank, len(M)) if M[r][c] != 0), None)
        if piv is None:
            continue
        M[rank], M[piv] = M[piv], M[rank]
        for r in range(len(M)):
            if r != rank and M[r][c] != 0:
                f = M[r][c] / M[rank][c]
                M[r] = [a - f * b for a, b in zip(M[r], M[rank])]
        rank += 1
    return rank


def jacobian_transversality_check(u: Sequence, indices: Sequence[int]) -> bool:
    """Full row rank of the matrix ``(i_t * u_j^(i_t - 1))``, the Jacobian of the power sums."""
    u = [to_rational(v) for v in u]
    if len(indices) > len(u):
        raise ValueError("more indices than variables")
    if list(indices) != sorted(set(indices)) or any(i < 1 for i in indices):
        raise ValueError("indices must be strictly increasing positive integers")
    rows = [[Fraction(i) * v ** (i - 1) for v in u] for i in indices]
    return _rank(rows) == len(indices)


def common_zero_cells(polys: Sequence[MultiPoly], region: RegionSpec, depth: int) -> list[Box]:
    """Boxes of side ``side / 2**depth`` where no enclosure excludes a common zero in ``R_delta``."""
    lows, width, q = region.box.scaled()
    level = [lows]
    for level_no in range(depth + 1):
        keep = []
        for cell in level:
            if region.check.excludes(cell, width, q):
                continue
            if all(lo <= 0 <= hi for lo, hi in (P.interval_scaled(cell, width, q) for P in polys)):
                keep.append(cell)
        if level_no == depth:
            return [Box(tuple(Fraction(a, q) for a in c), Fraction(width, q)) for c in keep]
        q *= 2
        level = [
            [2 * a + (width if (ch >> j) & 1 else 0) for j, a in enumerate(cell)]
            for cell in keep
            for ch in range(1 << len(cell))
        ]
    return []


def load_instance(obj) -> dict:
    """Parse a consistency instance ``{"m", "n", "H", "zeros", "delta"}``."""
    from .slp import build_powersum_slp

    try:
        m, n = int(obj["m"]), int(obj["n"])
        H = obj.get("H", "powersum")
        H = build_powersum_slp(m, n) if H == "powersum" else Slp.from_json(H)
        zeros = obj.get("zeros", "boolean-cube")
        zeros = boolean_zeros(n) if zeros == "boolean-cube" else ZeroList(tuple(tuple(z) for z in zeros))
        delta = obj.get("delta")
        if delta == "vandermonde":
            delta = DeltaDetProduct.for_boolean(m, n)
        elif delta is None or delta == 1 or delta == "1":
            delta = MultiPoly.constant(1, m)
        elif "vandermonde" in delta:
            delta = DeltaDetProduct.from_json(delta)
        else:
            delta = MultiPoly.from_json(delta.get("poly", delta))
    except ParseError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"malformed consistency instance: {exc}") from exc
    if H.num_inputs != m + n:
        raise ParseError(f"H has {H.num_inputs} inputs, expected m + n = {m + n}")
    if zeros.n != n:
        raise ParseError("zero length does not match n")
    return {"m": m, "n": n, "H": H, "zeros": zeros, "delta": delta}
