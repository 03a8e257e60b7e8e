"""Small end-to-end check run by ``signdb selftest``."""

from __future__ import annotations

import random
from fractions import Fraction
from itertools import product

from .appkit import DeltaDetProduct, boolean_zeros, brute_force_consistent, build_consistency_db, consistency_query
from .atlas import build_adaptive, build_uniform, deserialize, serialize
from .engine import naive_signs, sign_query
from .poly import MultiPoly
from .slp import bits_of, build_powersum_slp, slp_eval


def _family(rng, n, size):
    fam = []
    for _ in range(size):
        d = rng.randint(1, 3)
        terms = {e: rng.randint(-8, 8) for e in product(range(d + 1), repeat=n) if sum(e) <= d}
        fam.append(MultiPoly(n, terms))
    return fam


def _point(rng, n):
    out = []
    for _ in range(n):
        q = rng.randint(1, 64)
        out.append(Fraction(rng.randint(0, q), q))
    return tuple(out)


def run(seed: int = 0, verbose: bool = True) -> bool:
    rng = random.Random(seed)
    results = {}

    ok = True
    for n in (1, 2):
        fam = [P for P in _family(rng, n, 4) if not P.is_constant()] or [MultiPoly.variable(0, n)]
        for db in (build_adaptive(fam), build_uniform(fam, grid_log2=3)):
            db = deserialize(serialize(db))
            ok &= all(sign_query(db, x)[0] == naive_signs(db, x) for x in (_point(rng, n) for _ in range(50)))
    results["sign queries match direct evaluation"] = ok

    ok = True
    for m, n in ((1, 2), (2, 2), (3, 2)):
        H = build_powersum_slp(m, n)
        for j in range(1 << n):
            u = [Fraction(rng.randint(-9, 9), rng.randint(1, 9)) for _ in range(m)]
            ok &= slp_eval(H, u + list(bits_of(j, n)))[0][0] == sum(v**j for v in u)
    results["power-sum identity"] = ok

    H = build_powersum_slp(2, 2)
    zeros = boolean_zeros(2)
    db = build_consistency_db(H, zeros, DeltaDetProduct.for_boolean(2, 2), k=2)
    ok = all(
        consistency_query(db, u)[0] == brute_force_consistent(H, zeros, u)
        for u in (_point(rng, 2) for _ in range(50))
    )
    results["consistency queries match brute force"] = ok

    if verbose:
        for name, passed in results.items():
            print(f"{'PASS' if passed else 'FAIL'}  {name}")
    return all(results.values())
