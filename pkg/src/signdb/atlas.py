"""Sign-condition databases over ``[0,1]^n`` and the bound calculators behind them.

Two builders share one record format:

* ``build_uniform`` tiles the cube with ``(2**grid_log2)**n`` equal cells, the
  layout used by the query-partition tree;
* ``build_adaptive`` refines a ``2**n``-ary tree until at most ``k`` family
  members cut each leaf (or ``max_depth`` is reached, which flags the leaf as
  degenerate).

Each cell records which members cut it and the certified sign of every other
member on ``cell ∩ {delta >= 1}``.
"""

from __future__ import annotations

import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Optional, Sequence

from .errors import DomainError, GridTooLarge, SchemaError
from .numeric import bounded_power_product
from .poly import MultiPoly
from .region import (
    DEFAULT_DEPTH_LIMIT,
    Box,
    ConstSign,
    Cuts,
    EmptyRegion,
    RegionSpec,
    Undecided,
    decide_cut,
    region_status,
)
from .slp import Slp, slp_from_poly

FORMAT_VERSION = 1
DEFAULT_CELL_BUDGET = 1 << 20
DEFAULT_MAX_DEPTH = 12


def cell_budget() -> int:
    return int(os.environ.get("SIGNDB_CELL_BUDGET", DEFAULT_CELL_BUDGET))


# ---------------------------------------------------------------------------
# bound calculators


def coarseness_log2(n: int, d: int, h: int, c_prime: int = 1, digit_budget=None) -> int:
    """log2 of the coarseness side length: ``-h * d**(c' n^2) + 1``.

    ``c_prime`` stands in for a universal constant that is only known to exist;
    the default of 1 is a placeholder, not a proven value.
    """
    if n < 1 or d <= 1 or h < 1 or c_prime < 0:
        raise DomainError("coarseness_log2 needs n >= 1, d > 1, h >= 1, c' >= 0")
    return 1 - bounded_power_product(h, d, c_prime * n * n, digit_budget)


def distance_bound_log2(n: int, d: int, h: int, c: int = 1, digit_budget=None) -> int:
    """log2 of the separation bound ``2**(-h * d**(c n))`` between disjoint zero sets."""
    if n < 1 or d <= 1 or h < 1 or c < 0:
        raise DomainError("distance_bound_log2 needs n >= 1, d > 1, h >= 1, c >= 0")
    return -bounded_power_product(h, d, c * n, digit_budget)


# ---------------------------------------------------------------------------
# records and database


@dataclass(frozen=True)
class CellRecord:
    cutting: tuple = ()
    fixed_signs: tuple = ()
    empty_region: bool = False
    degenerate: bool = False

    def __post_init__(self):
        object.__setattr__(self, "cutting", tuple(sorted(self.cutting)))
        object.__setattr__(self, "fixed_signs", tuple(sorted(tuple(p) for p in self.fixed_signs)))
        if set(self.cutting) & {i for i, _ in self.fixed_signs}:
            raise ValueError("an index cannot be both cutting and fixed")

    def to_json(self) -> dict:
        return {
            "cutting": list(self.cutting),
            "fixed": [list(p) for p in self.fixed_signs],
            "empty": self.empty_region,
            "degenerate": self.degenerate,
        }

    @classmethod
    def from_json(cls, obj) -> "CellRecord":
        return cls(
            tuple(int(i) for i in obj["cutting"]),
            tuple((int(i), int(s)) for i, s in obj["fixed"]),
            bool(obj["empty"]),
            bool(obj["degenerate"]),
        )


@dataclass(frozen=True)
class TreeNode:
    """Adaptive tree node: a leaf carries ``record``, an inner node ``children``."""

    record: Optional[CellRecord] = None
    children: Optional[tuple] = None

    @property
    def is_leaf(self) -> bool:
        return self.children is None

    def to_json(self):
        if self.is_leaf:
            return {"leaf": self.record.to_json()}
        return {"children": [c.to_json() for c in self.children]}

    @classmethod
    def from_json(cls, obj) -> "TreeNode":
        if "leaf" in obj:
            return cls(record=CellRecord.from_json(obj["leaf"]))
        return cls(children=tuple(cls.from_json(c) for c in obj["children"]))


@dataclass(frozen=True)
class SignDatabase:
    n: int
    family: tuple
    delta: object
    mode: str
    k: int
    depth_limit: int
    grid_log2: Optional[int] = None
    max_depth: Optional[int] = None
    cells: Optional[tuple] = None
    tree: Optional[TreeNode] = None
    programs: Optional[tuple] = None
    _default_programs: list = field(default_factory=list, compare=False, repr=False)

    @property
    def s(self) -> int:
        return len(self.family)

    def resolve_programs(self, programs=None) -> tuple:
        """Explicit programs, else embedded ones, else programs compiled from the family."""
        if programs is not None:
            programs = tuple(programs)
        elif self.programs is not None:
            programs = self.programs
        else:
            if not self._default_programs:
                self._default_programs.extend(slp_from_poly(P) for P in self.family)
            programs = tuple(self._default_programs)
        if len(programs) != self.s:
            raise ValueError(f"need {self.s} programs, got {len(programs)}")
        for p in programs:
            if p.num_inputs != self.n:
                raise ValueError("program arity does not match the database dimension")
        return programs

    def leaves(self) -> Iterator[tuple]:
        """Yield ``(cell_id, box, record)`` for every cell or leaf."""
        if self.mode == "uniform":
            m = 1 << self.grid_log2
            side = Fraction(1, m)
            for lin, rec in enumerate(self.cells):
                idx = tuple((lin // m**j) % m for j in range(self.n))
                yield idx, Box(tuple(i * side for i in idx), side), rec
        else:
            stack = [((), Box.unit(self.n), self.tree)]
            while stack:
                path, box, node = stack.pop()
                if node.is_leaf:
                    yield path, box, node.record
                else:
                    for c in reversed(range(len(node.children))):
                        stack.append((path + (c,), box.child(c), node.children[c]))

    def record(self, cell_id) -> CellRecord:
        if self.mode == "uniform":
            m = 1 << self.grid_log2
            return self.cells[sum(i * m**j for j, i in enumerate(cell_id))]
        node = self.tree
        for c in cell_id:
            node = node.children[c]
        return node.record

    def summary(self) -> dict:
        leaves = [rec for _, _, rec in self.leaves()]
        return {
            "mode": self.mode,
            "cells": len(leaves),
            "degenerate": sum(r.degenerate for r in leaves),
            "empty": sum(r.empty_region for r in leaves),
            "max_cutting": max((len(r.cutting) for r in leaves), default=0),
        }


# ---------------------------------------------------------------------------
# building


def _classify(family, region, candidates, depth_limit):
    cutting, fixed, empty = [], [], False
    for i in candidates:
        st = decide_cut(family[i], region, depth_limit)
        if isinstance(st, (Cuts, Undecided)):
            cutting.append(i)
        elif isinstance(st, ConstSign):
            fixed.append((i, st.sign))
        else:
            empty = True
    return cutting, fixed, empty


def _region_empty(region, depth_limit) -> bool:
    return region_status(region, depth_limit) == "empty"


def _grow(family, region, depth, candidates, fixed, k, max_depth, depth_limit) -> TreeNode:
    if _region_empty(region, depth_limit):
        return TreeNode(CellRecord(fixed_signs=fixed, empty_region=True))
    cutting, more_fixed, empty = _classify(family, region, candidates, depth_limit)
    if empty:
        return TreeNode(CellRecord(fixed_signs=fixed, empty_region=True))
    fixed = tuple(fixed) + tuple(more_fixed)
    if len(cutting) <= k:
        return TreeNode(CellRecord(cutting, fixed))
    if depth >= max_depth:
        return TreeNode(CellRecord(cutting, fixed, degenerate=True))
    children = tuple(
        _grow(family, region.with_box(b), depth + 1, cutting, fixed, k, max_depth, depth_limit)
        for b in region.box.subdivide()
    )
    return TreeNode(children=children)


def _grow_task(args):
    family, delta, box, depth, cutting, fixed, k, max_depth, depth_limit = args
    return _grow(family, RegionSpec(box, delta), depth, cutting, fixed, k, max_depth, depth_limit)


def _check_family(family, delta):
    family = tuple(family)
    if not family:
        raise ValueError("the family must contain at least one polynomial")
    n = family[0].num_vars
    if n < 1 or any(P.num_vars != n for P in family):
        raise ValueError("all family members must share a positive number of variables")
    if delta is None:
        delta = MultiPoly.constant(1, n)
    if delta.num_vars != n:
        raise ValueError("delta has the wrong number of variables")
    return family, delta, n


def build_adaptive(
    family: Sequence[MultiPoly],
    delta=None,
    k: Optional[int] = None,
    max_depth: int = DEFAULT_MAX_DEPTH,
    depth_limit: int = DEFAULT_DEPTH_LIMIT,
    threads: int = 1,
    programs=None,
) -> SignDatabase:
    family, delta, n = _check_family(family, delta)
    k = n if k is None else k
    if k < 1:
        raise ValueError("k must be >= 1")
    region = RegionSpec(Box.unit(n), delta)
    everyone = tuple(range(len(family)))
    if threads > 1 and max_depth > 0:
        # classify the root here, farm out the 2**n subtrees
        if _region_empty(region, depth_limit):
            root = TreeNode(CellRecord(empty_region=True))
        else:
            cutting, fixed, empty = _classify(family, region, everyone, depth_limit)
            if empty:
                root = TreeNode(CellRecord(empty_region=True))
            elif len(cutting) <= k:
                root = TreeNode(CellRecord(cutting, fixed))
            else:
                tasks = [
                    (family, delta, b, 1, tuple(cutting), tuple(fixed), k, max_depth, depth_limit)
                    for b in region.box.subdivide()
                ]
                with ProcessPoolExecutor(max_workers=threads) as pool:
                    root = TreeNode(children=tuple(pool.map(_grow_task, tasks)))
    else:
        root = _grow(family, region, 0, everyone, (), k, max_depth, depth_limit)
    return SignDatabase(
        n=n,
        family=family,
        delta=delta,
        mode="adaptive",
        k=k,
        depth_limit=depth_limit,
        max_depth=max_depth,
        tree=root,
        programs=tuple(programs) if programs is not None else None,
    )


def _fill_uniform(family, region, depth, mu, candidates, fixed, k, depth_limit, out, m):
    """Descend the dyadic tree to depth ``mu``, reusing certificates of ancestors."""
    box = region.box
    if _region_empty(region, depth_limit):
        rec = CellRecord(fixed_signs=fixed, empty_region=True)
        cutting = None
    else:
        cutting, more_fixed, empty = _classify(family, region, candidates, depth_limit)
        if empty:
            rec = CellRecord(fixed_signs=fixed, empty_region=True)
            cutting = None
        else:
            fixed = tuple(fixed) + tuple(more_fixed)
            rec = CellRecord(cutting, fixed, degenerate=len(cutting) > k)
    if depth == mu or cutting is None or not cutting:
        # every grid cell below this box shares the record
        span = 1 << (mu - depth)
        base = [int(a * m) for a in box.lower]
        _paint(out, base, span, m, rec)
        return
    for b in box.subdivide():
        _fill_uniform(family, region.with_box(b), depth + 1, mu, cutting, fixed, k, depth_limit, out, m)


def _paint(out, base, span, m, rec):
    n = len(base)
    for off in range(span**n):
        lin = 0
        for j in range(n):
            lin += (base[j] + (off // span**j) % span) * m**j
        out[lin] = rec


def build_uniform(
    family: Sequence[MultiPoly],
    delta=None,
    grid_log2: int = 4,
    depth_limit: int = DEFAULT_DEPTH_LIMIT,
    k: Optional[int] = None,
    budget: Optional[int] = None,
    programs=None,
) -> SignDatabase:
    """Grid database with ``m = 2**grid_log2`` cells per axis.

    Cells are classified top-down so that a sign certified on a dyadic ancestor
    is reused instead of being re-derived for every grid cell below it.
    """
    family, delta, n = _check_family(family, delta)
    if grid_log2 < 1:
        raise ValueError("grid_log2 must be >= 1")
    k = n if k is None else k
    budget = cell_budget() if budget is None else budget
    m = 1 << grid_log2
    if m**n > budget:
        raise GridTooLarge(f"{m}^{n} = {m**n} cells exceed the budget of {budget}")
    out: list = [None] * (m**n)
    region = RegionSpec(Box.unit(n), delta)
    _fill_uniform(family, region, 0, grid_log2, tuple(range(len(family))), (), k, depth_limit, out, m)
    return SignDatabase(
        n=n,
        family=family,
        delta=delta,
        mode="uniform",
        k=k,
        depth_limit=depth_limit,
        grid_log2=grid_log2,
        cells=tuple(out),
        programs=tuple(programs) if programs is not None else None,
    )


# ---------------------------------------------------------------------------
# serialization


def delta_to_json(delta) -> dict:
    if isinstance(delta, MultiPoly):
        return {"poly": delta.to_json()}
    return delta.to_json()


def delta_from_json(obj):
    if "poly" in obj:
        return MultiPoly.from_json(obj["poly"])
    if "vandermonde" in obj:
        from .appkit import DeltaDetProduct

        return DeltaDetProduct.from_json(obj)
    raise SchemaError(f"unknown delta descriptor {sorted(obj)}")


def db_to_json(db: SignDatabase) -> dict:
    meta = {
        "n": db.n,
        "s": db.s,
        "k": db.k,
        "depth_limit": db.depth_limit,
        "delta": delta_to_json(db.delta),
        "family": [P.to_json() for P in db.family],
    }
    out = {"version": FORMAT_VERSION, "mode": db.mode, "meta": meta}
    if db.programs is not None:
        out["programs"] = [p.to_json() for p in db.programs]
    if db.mode == "uniform":
        meta["grid_log2"] = db.grid_log2
        table: dict = {}
        index = []
        for rec in db.cells:
            if rec not in table:
                table[rec] = len(table)
            index.append(table[rec])
        out["cells"] = {"records": [r.to_json() for r in table], "index": index}
    else:
        meta["max_depth"] = db.max_depth
        out["tree"] = db.tree.to_json()
    return out


def db_from_json(obj) -> SignDatabase:
    try:
        if obj.get("version") != FORMAT_VERSION:
            raise SchemaError(f"unsupported database version {obj.get('version')!r}")
        meta = obj["meta"]
        mode = obj["mode"]
        family = tuple(MultiPoly.from_json(p) for p in meta["family"])
        if len(family) != meta["s"]:
            raise SchemaError("family size does not match meta.s")
        programs = None
        if "programs" in obj:
            programs = tuple(Slp.from_json(p) for p in obj["programs"])
        common = dict(
            n=int(meta["n"]),
            family=family,
            delta=delta_from_json(meta["delta"]),
            k=int(meta["k"]),
            depth_limit=int(meta["depth_limit"]),
            programs=programs,
        )
        if mode == "uniform":
            records = [CellRecord.from_json(r) for r in obj["cells"]["records"]]
            cells = tuple(records[i] for i in obj["cells"]["index"])
            mu = int(meta["grid_log2"])
            if len(cells) != (1 << mu) ** common["n"]:
                raise SchemaError("cell count does not match the grid")
            return SignDatabase(mode=mode, grid_log2=mu, cells=cells, **common)
        if mode == "adaptive":
            return SignDatabase(
                mode=mode, max_depth=int(meta["max_depth"]), tree=TreeNode.from_json(obj["tree"]), **common
            )
        raise SchemaError(f"unknown mode {mode!r}")
    except SchemaError:
        raise
    except (KeyError, TypeError, ValueError, IndexError, AttributeError) as exc:
        raise SchemaError(f"malformed database: {exc}") from exc


def serialize(db: SignDatabase) -> bytes:
    return json.dumps(db_to_json(db), sort_keys=True, separators=(",", ":")).encode()


def deserialize(payload: bytes) -> SignDatabase:
    try:
        obj = json.loads(payload.decode() if isinstance(payload, (bytes, bytearray)) else payload)
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise SchemaError(f"payload is not valid JSON: {exc}") from exc
    if not isinstance(obj, dict):
        raise SchemaError("payload must be a JSON object")
    return db_from_json(obj)
