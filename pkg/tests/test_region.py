import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from signdb.errors import ParseError
from signdb.poly import MultiPoly
from signdb.region import (
    Box,
    ConstSign,
    Cuts,
    EmptyRegion,
    RegionSpec,
    Undecided,
    box_subdivide,
    decide_cut,
    oracle_cut_sample,
    region_status,
)
from strategies import random_poly

X1 = MultiPoly.variable(0, 1)
HALF = 2 * X1 - 1  # X1 - 1/2, cleared of denominators
DELTA_LOW = 2 * X1 - 1


def test_box_subdivide():
    a, b = box_subdivide(Box.unit(1))
    assert (a.lower, a.side, b.lower) == ((0,), Fraction(1, 2), (Fraction(1, 2),))
    kids = Box.unit(2).subdivide()
    assert [k.lower for k in kids] == [(0, 0), (Fraction(1, 2), 0), (0, Fraction(1, 2)), (Fraction(1, 2), Fraction(1, 2))]
    for k in Box((Fraction(1, 4), 0), Fraction(1, 4)).subdivide():
        assert k.side == Fraction(1, 8)


def test_box_json_and_validation():
    box = Box((Fraction(1, 3), 0), Fraction(1, 9))
    assert Box.from_json(box.to_json()) == box
    with pytest.raises(ValueError):
        Box((0,), 0)
    with pytest.raises(ParseError):
        Box.from_json({"lower": ["1/0"], "side": "1"})
    with pytest.raises(ParseError):
        Box.from_json({"side": "1"})


def test_decide_cut_examples():
    st_ = decide_cut(HALF, RegionSpec(Box.unit(1)))
    assert isinstance(st_, Cuts)
    assert st_.witness_a == (0,) and st_.witness_b == (1,) and st_.signs == (-1, 1)
    plus = MultiPoly(2, {(1, 0): 1, (0, 0): 1})
    assert decide_cut(plus, RegionSpec(Box.unit(2))) == ConstSign(1)
    low = RegionSpec(Box((0,), Fraction(3, 8)), DELTA_LOW)
    assert decide_cut(X1 * X1 - 3, low) == EmptyRegion()
    assert decide_cut(MultiPoly(1, {}), RegionSpec(Box.unit(1))) == ConstSign(0)


def test_decide_cut_needs_subdivision():
    # roots at 1/4 and 3/4 sit on the box faces; the root enclosure is inconclusive
    P = (4 * X1 - 1) * (4 * X1 - 3)
    st_ = decide_cut(P, RegionSpec(Box((Fraction(1, 4),), Fraction(1, 2))))
    assert isinstance(st_, Cuts)
    Q = X1 * X1 - X1 + 1  # > 0 but term-wise enclosure on [0,1] is [0, 2]
    assert decide_cut(Q, RegionSpec(Box.unit(1))) == ConstSign(1)


def test_decide_cut_undecided_at_depth_zero():
    P = X1 * X1 - X1 + 1
    assert decide_cut(P, RegionSpec(Box.unit(1)), depth_limit=0) == Undecided()
    with pytest.raises(ValueError):
        decide_cut(P, RegionSpec(Box.unit(1)), depth_limit=-1)


def test_region_status():
    assert region_status(RegionSpec(Box.unit(1))) == "nonempty"
    assert region_status(RegionSpec(Box((0,), Fraction(3, 8)), DELTA_LOW)) == "empty"
    assert region_status(RegionSpec(Box.unit(1), DELTA_LOW)) == "nonempty"
    assert region_status(RegionSpec(Box.unit(1), MultiPoly.constant(0, 1))) == "empty"


def test_oracle_examples():
    assert oracle_cut_sample(HALF, RegionSpec(Box.unit(1)), 2) == {-1, 0, 1}
    assert oracle_cut_sample(MultiPoly.constant(1, 1), RegionSpec(Box.unit(1)), 3) == {1}
    assert oracle_cut_sample(HALF, RegionSpec(Box((0,), Fraction(3, 8)), DELTA_LOW), 3) == set()
    with pytest.raises(ValueError):
        oracle_cut_sample(HALF, RegionSpec(Box.unit(1)), 0)


def test_oracle_large_values_use_exact_integers():
    P = MultiPoly(1, {(9,): 10**12, (0,): -1})
    assert oracle_cut_sample(P, RegionSpec(Box.unit(1)), 8) == {-1, 1}


def _fuzz_instance(rng):
    n = rng.randint(1, 2)
    P = random_poly(rng, n, rng.randint(1, 3))
    q = 1 << rng.randint(0, 3)
    side = Fraction(rng.randint(1, q), q)
    box = Box(tuple(Fraction(rng.randint(0, q), q) * (1 - side) for _ in range(n)), side)
    delta = None if rng.random() < 0.5 else random_poly(rng, n, rng.randint(1, 2), cmax=4) + 4
    return P, RegionSpec(box, delta)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32))
def test_decide_cut_sound_against_oracle(seed):
    P, region = _fuzz_instance(random.Random(seed))
    status = decide_cut(P, region, depth_limit=6)
    seen = oracle_cut_sample(P, region, 4)
    if isinstance(status, ConstSign):
        assert seen <= {status.sign}
    elif isinstance(status, Cuts):
        for w, s in zip((status.witness_a, status.witness_b), status.signs):
            assert region.contains(w) and P.sign_at(w) == s
        assert status.signs[0] != status.signs[1]
    elif isinstance(status, EmptyRegion):
        assert seen == set()
