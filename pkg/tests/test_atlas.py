import json
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from signdb.atlas import (
    CellRecord,
    build_adaptive,
    build_uniform,
    coarseness_log2,
    deserialize,
    distance_bound_log2,
    serialize,
)
from signdb.errors import BoundTooLarge, DomainError, GridTooLarge, SchemaError
from signdb.poly import MultiPoly
from strategies import random_family

X1 = MultiPoly.variable(0, 1)


def _by_lower(db):
    return {box.lower: rec for _, box, rec in db.leaves()}


def test_coarseness_examples():
    assert coarseness_log2(1, 2, 1, 1) == -1
    assert coarseness_log2(2, 2, 1, 1) == -15
    with pytest.raises(DomainError):
        coarseness_log2(1, 2, 0)
    with pytest.raises(DomainError):
        coarseness_log2(1, 1, 1)
    with pytest.raises(BoundTooLarge):
        coarseness_log2(9, 9, 9, 9)


def test_distance_examples():
    assert distance_bound_log2(1, 2, 1, 1) == -2
    assert distance_bound_log2(2, 2, 3, 1) == -12
    assert distance_bound_log2(1, 2, 1, 0) == -1
    with pytest.raises(DomainError):
        distance_bound_log2(1, 2, 0)


def test_uniform_examples():
    db = build_uniform([3 * X1 - 1], grid_log2=1)
    cells = _by_lower(db)
    assert cells[(0,)].cutting == (0,)
    assert cells[(Fraction(1, 2),)] == CellRecord((), ((0, 1),))
    db = build_uniform([X1 + 1], grid_log2=1)
    assert all(rec == CellRecord((), ((0, 1),)) for rec in db.cells)
    db = build_uniform([4 * X1 - 1], grid_log2=2)
    cut = [box.lower for _, box, rec in db.leaves() if rec.cutting]
    assert cut == [(0,), (Fraction(1, 4),)]
    assert [rec.fixed_signs for rec in db.cells[2:]] == [((0, 1),), ((0, 1),)]


def test_uniform_budget(monkeypatch):
    with pytest.raises(GridTooLarge):
        build_uniform([X1], grid_log2=5, budget=16)
    monkeypatch.setenv("SIGNDB_CELL_BUDGET", "8")
    with pytest.raises(GridTooLarge):
        build_uniform([X1], grid_log2=4)


def test_adaptive_examples():
    db = build_adaptive([2 * X1 - 1, 4 * X1 - 3], k=1)
    leaves = _by_lower(db)
    assert leaves[(0,)].cutting == (0,)
    # both members vanish on the boundary of [1/2, 3/4], so it is refined once more
    assert (Fraction(3, 4),) in leaves
    assert all(len(rec.cutting) <= 1 and not rec.degenerate for rec in leaves.values())
    single = build_adaptive([X1 * X1 - X1], k=1)
    assert single.tree.is_leaf
    shared = build_adaptive([3 * X1 - 1, 6 * X1 - 2 + (3 * X1 - 1) * X1], k=1, max_depth=3)
    assert any(rec.degenerate for _, _, rec in shared.leaves())


def test_delta_restricted_build():
    # delta = 2 X1 - 1 >= 1 only at X1 = 1
    db = build_adaptive([4 * X1 - 3], 2 * X1 - 1, k=1)
    assert db.tree.record == CellRecord((), ((0, 1),))
    # delta = 8 X1 - 4 >= 1 iff X1 >= 5/8, so the left half is certified empty
    db = build_adaptive([4 * X1 - 3, 8 * X1 - 7], 8 * X1 - 4, k=1)
    assert _by_lower(db)[(0,)].empty_region


def test_leaves_tile_the_cube():
    rng = random.Random(3)
    fam = random_family(rng, 2, max_size=4)
    for db in (build_adaptive(fam), build_uniform(fam, grid_log2=3)):
        assert sum(box.side ** 2 for _, box, _ in db.leaves()) == 1
        for _, _, rec in db.leaves():
            if not rec.empty_region:
                got = set(rec.cutting) | {i for i, _ in rec.fixed_signs}
                assert got == set(range(len(fam)))


def test_cell_record_invariant():
    with pytest.raises(ValueError):
        CellRecord((0,), ((0, 1),))


def test_serialize_roundtrip_and_errors():
    db = build_adaptive([2 * X1 - 1, 4 * X1 - 3], k=1)
    payload = serialize(db)
    assert deserialize(payload) == db
    assert serialize(deserialize(payload)) == payload
    with pytest.raises(SchemaError):
        deserialize(payload[: len(payload) // 2])
    obj = json.loads(payload)
    obj["version"] = 99
    with pytest.raises(SchemaError):
        deserialize(json.dumps(obj).encode())
    obj = json.loads(payload)
    del obj["meta"]["family"]
    with pytest.raises(SchemaError):
        deserialize(json.dumps(obj).encode())
    u = build_uniform([2 * X1 - 1], grid_log2=3)
    assert deserialize(serialize(u)) == u
    obj = json.loads(serialize(u))
    obj["cells"]["index"].pop()
    with pytest.raises(SchemaError):
        deserialize(json.dumps(obj).encode())


def test_threaded_build_matches_serial():
    fam = random_family(random.Random(5), 2, max_size=5)
    assert build_adaptive(fam, threads=2) == build_adaptive(fam)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32))
def test_builds_are_deterministic(seed):
    fam = random_family(random.Random(seed), 1, max_size=4)
    assert serialize(build_adaptive(fam)) == serialize(build_adaptive(fam))
    assert serialize(build_uniform(fam, grid_log2=2)) == serialize(build_uniform(fam, grid_log2=2))
