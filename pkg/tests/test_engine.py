import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from signdb.atlas import build_adaptive, build_uniform
from signdb.engine import QueryStats, bench, locate, naive_signs, sign_query
from signdb.errors import OutOfDomain, OutsideRegion
from signdb.poly import MultiPoly
from signdb.slp import slp_from_poly
from strategies import random_family, random_point

X1 = MultiPoly.variable(0, 1)


def test_locate_examples():
    db = build_uniform([X1], grid_log2=2)
    cell, stats = locate(db, [Fraction(1, 3)])
    assert cell == (1,) and stats.comparisons <= 2
    assert locate(build_uniform([X1], grid_log2=1), [Fraction(1, 2)])[0] == (0,)
    two = MultiPoly(2, {(1, 0): 1, (0, 1): -1})
    assert locate(build_uniform([two], grid_log2=3), [0, 0])[0] == (0, 0)
    ad = build_adaptive([2 * X1 - 1, 4 * X1 - 3], k=1)
    path, _ = locate(ad, [0])
    assert all(c == 0 for c in path)


def test_locate_ties_go_to_lower_cell():
    db = build_uniform([X1], grid_log2=3)
    for i in range(1, 8):
        assert locate(db, [Fraction(i, 8)])[0] == (i - 1,)
    assert locate(db, [1])[0] == (7,)


def test_sign_query_examples():
    db = build_uniform([X1 + 1], grid_log2=2)
    assert sign_query(db, [Fraction(1, 5)]) == ((1,), QueryStats(2, 0))
    db = build_uniform([3 * X1 - 1], grid_log2=1)
    signs, stats = sign_query(db, [Fraction(2, 3)])
    assert signs == (1,) and stats.arith_ops == 0
    signs, stats = sign_query(db, [Fraction(1, 3)])
    assert signs == (0,) and stats.arith_ops == slp_from_poly(3 * X1 - 1).length


def test_sign_query_errors():
    db = build_adaptive([2 * X1 - 1], 2 * X1)
    with pytest.raises(OutOfDomain):
        sign_query(db, [Fraction(3, 2)])
    with pytest.raises(ValueError):
        sign_query(db, [0, 0])
    with pytest.raises(OutsideRegion):
        sign_query(db, [Fraction(1, 4)], verify_delta=True)
    signs, stats = sign_query(db, [Fraction(3, 4)], verify_delta=True)
    assert signs == (1,) and stats.arith_ops > 0


def test_empty_cell_falls_back_to_full_evaluation():
    db = build_adaptive([4 * X1 - 3, 8 * X1 - 7], 8 * X1 - 4, k=1)
    x = [Fraction(1, 8)]
    assert sign_query(db, x)[0] == naive_signs(db, x) == (-1, -1)


def test_bench_examples():
    fam = [X1 + 1, X1 * X1 + 2]
    db = build_uniform(fam, grid_log2=2)
    rep = bench(db, [[Fraction(1, 3)], [1]])
    assert rep["arith_ops_total"] == 0
    assert rep["naive_ops_per_query"] == sum(slp_from_poly(P).length for P in fam)
    _, st1 = sign_query(db, [Fraction(1, 3)])
    one = bench(db, [[Fraction(1, 3)]])
    assert (one["comparisons_total"], one["arith_ops_total"]) == (st1.comparisons, st1.arith_ops)


def test_generic_family_n2_op_bound():
    rng = random.Random(11)
    for _ in range(5):
        fam = random_family(rng, 2)
        db = build_adaptive(fam)
        L = max(slp_from_poly(P).length for P in fam)
        for _ in range(30):
            x = random_point(rng, 2)
            cell, _ = locate(db, x)
            signs, stats = sign_query(db, x)
            assert signs == naive_signs(db, x)
            if not db.record(cell).degenerate:
                assert stats.arith_ops <= 2 * L


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32), st.sampled_from(["adaptive", "uniform"]))
def test_sign_query_matches_direct_evaluation(seed, mode):
    rng = random.Random(seed)
    n = rng.randint(1, 2)
    fam = random_family(rng, n, max_size=4)
    db = build_adaptive(fam, max_depth=8) if mode == "adaptive" else build_uniform(fam, grid_log2=3)
    for _ in range(10):
        x = random_point(rng, n)
        assert sign_query(db, x)[0] == naive_signs(db, x)
    # grid points on cell faces exercise the tie rule
    for _ in range(5):
        x = tuple(Fraction(rng.randint(0, 8), 8) for _ in range(n))
        assert sign_query(db, x)[0] == naive_signs(db, x)
