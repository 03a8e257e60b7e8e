"""Command-line interface.

Exit codes: 0 success, 1 oracle mismatch, 2 parse error, 3 budget exceeded,
4 domain precondition violated.
"""

from __future__ import annotations

import argparse
import json
import os
import random
import sys
import tempfile
import time
from fractions import Fraction

from . import atlas, engine
from .appkit import build_consistency_db, consistency_query, load_instance
from .errors import BudgetError, DomainError, ParseError
from .poly import MultiPoly, family_cardinality_bound
from .region import DEFAULT_DEPTH_LIMIT, Box, RegionSpec, decide_cut
from .validation import check_family, parse_point

EXIT_OK, EXIT_MISMATCH, EXIT_PARSE, EXIT_BUDGET, EXIT_DOMAIN = 0, 1, 2, 3, 4


def _load_json(value: str):
    """Inline JSON when it looks like JSON, otherwise a path to a JSON file."""
    try:
        if value.lstrip()[:1] in "{[":
            return json.loads(value)
        with open(value, encoding="utf-8") as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON in {value!r}: {exc}") from exc
    except OSError as exc:
        raise ParseError(f"cannot read {value!r}: {exc}") from exc


def _write_atomic(path: str, data: bytes) -> None:
    folder = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=folder, prefix=".signdb-")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _load_family(value: str):
    obj = _load_json(value)
    polys = obj["polys"] if isinstance(obj, dict) and "polys" in obj else obj
    if not isinstance(polys, list):
        raise ParseError("family must be a list of polynomials or {'polys': [...]}")
    return check_family(polys)


def _load_delta(value, n):
    if value is None:
        return None
    obj = _load_json(value)
    if isinstance(obj, dict) and ("poly" in obj or "vandermonde" in obj):
        return atlas.delta_from_json(obj)
    return MultiPoly.from_json(obj)


def _load_db(path: str):
    try:
        with open(path, "rb") as fh:
            return atlas.deserialize(fh.read())
    except OSError as exc:
        raise ParseError(f"cannot read database {path!r}: {exc}") from exc


def _emit(obj) -> None:
    print(json.dumps(obj, sort_keys=True))


def _build_db(args):
    if args.instance:
        inst = load_instance(_load_json(args.instance))
        return build_consistency_db(
            inst["H"],
            inst["zeros"],
            inst["delta"],
            mode=args.mode,
            k=args.k,
            max_depth=args.max_depth,
            depth_limit=args.depth_limit,
            grid_log2=args.grid_log2,
            threads=args.threads,
        )
    if not args.family:
        raise ParseError("build needs --family or --instance")
    family = _load_family(args.family)
    delta = _load_delta(args.delta, family[0].num_vars)
    if args.mode == "uniform":
        return atlas.build_uniform(family, delta, args.grid_log2, args.depth_limit, args.k, args.cell_budget)
    return atlas.build_adaptive(family, delta, args.k, args.max_depth, args.depth_limit, args.threads)


def cmd_build(args) -> int:
    start = time.perf_counter()
    db = _build_db(args)
    _write_atomic(args.out, atlas.serialize(db))
    report = db.summary()
    report["wall_time_s"] = round(time.perf_counter() - start, 4)
    report["out"] = args.out
    _emit(report)
    return EXIT_OK


def cmd_query(args) -> int:
    db = _load_db(args.db)
    pt = parse_point(args.point)
    signs, stats = engine.sign_query(db, pt, verify_delta=args.verify_delta)
    out = {"signs": list(signs), "stats": stats.to_json()}
    code = EXIT_OK
    if args.naive:
        naive = engine.naive_signs(db, pt)
        out["naive"] = list(naive)
        out["match"] = naive == signs
        if naive != signs:
            code = EXIT_MISMATCH
    _emit(out)
    return code


def cmd_cut(args) -> int:
    obj = _load_json(args.poly)
    P = MultiPoly.from_json(obj)
    box = Box.from_json(_load_json(args.box)) if args.box else Box.unit(P.num_vars)
    delta = _load_delta(args.delta, P.num_vars)
    status = decide_cut(P, RegionSpec(box, delta), args.depth_limit)
    _emit(status.to_json())
    return EXIT_OK


def cmd_consistency(args) -> int:
    if args.db:
        db = _load_db(args.db)
    elif args.instance:
        inst = load_instance(_load_json(args.instance))
        db = build_consistency_db(
            inst["H"],
            inst["zeros"],
            inst["delta"],
            mode=args.mode,
            k=args.k,
            max_depth=args.max_depth,
            depth_limit=args.depth_limit,
            grid_log2=args.grid_log2,
        )
    else:
        raise ParseError("consistency needs --instance or --db")
    ok, stats = consistency_query(db, parse_point(args.point), verify_delta=args.verify_delta)
    print(f"consistent: {'true' if ok else 'false'}")
    _emit(stats.to_json())
    return EXIT_OK


def cmd_bounds(args) -> int:
    out = {
        "coarseness_log2": atlas.coarseness_log2(args.n, args.d, args.h, args.c_prime, args.digit_budget),
        "distance_bound_log2": atlas.distance_bound_log2(args.n, args.d, args.h, args.c, args.digit_budget),
        "family_cardinality_log2": family_cardinality_bound(args.n, args.d, args.h, args.digit_budget),
    }
    # exact integers can exceed JSON's safe range, so print them as strings
    _emit({k: str(v) for k, v in out.items()})
    return EXIT_OK


def _read_points(path: str, n: int):
    try:
        with open(path, encoding="utf-8") as fh:
            return [parse_point(line) for line in fh if line.strip()]
    except OSError as exc:
        raise ParseError(f"cannot read points {path!r}: {exc}") from exc


def cmd_bench(args) -> int:
    db = _load_db(args.db)
    if args.points:
        pts = _read_points(args.points, db.n)
    else:
        rng = random.Random(args.seed)
        pts = []
        for _ in range(args.random):
            pt = []
            for _ in range(db.n):
                q = rng.randint(1, 1000)
                pt.append(Fraction(rng.randint(0, q), q))
            pts.append(tuple(pt))
    report = engine.bench(db, pts, verify_delta=args.verify_delta)
    if not args.per_query:
        report.pop("per_query")
    _emit(report)
    return EXIT_OK


def cmd_selftest(args) -> int:
    from .selftest import run

    return EXIT_OK if run(seed=args.seed) else EXIT_MISMATCH


def _add_build_flags(p, with_out=True):
    p.add_argument("--mode", choices=("adaptive", "uniform"), default="adaptive")
    p.add_argument("--grid-log2", type=int, default=4, help="uniform mode: 2**grid_log2 cells per axis")
    p.add_argument("--k", type=int, default=None, help="cutting members allowed per leaf (default: n)")
    p.add_argument("--max-depth", type=int, default=atlas.DEFAULT_MAX_DEPTH)
    p.add_argument("--depth-limit", type=int, default=DEFAULT_DEPTH_LIMIT)
    p.add_argument("--threads", type=int, default=1)


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="signdb", description=__doc__.splitlines()[0])
    parser.add_argument("--seed", type=int, default=0, help="seed for every randomized step")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build", help="build a sign database")
    p.add_argument("--family", help="family JSON (file or inline)")
    p.add_argument("--instance", help="consistency instance JSON; builds the specialised family")
    p.add_argument("--delta", help="delta polynomial JSON (default: 1)")
    p.add_argument("--cell-budget", type=int, default=None)
    p.add_argument("--out", required=True)
    _add_build_flags(p)
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("query", help="sign vector at a point")
    p.add_argument("--db", required=True)
    p.add_argument("--point", required=True, help='comma-separated rationals, e.g. "1/3,2/5"')
    p.add_argument("--verify-delta", action="store_true")
    p.add_argument("--naive", action="store_true", help="also evaluate every member directly and compare")
    p.set_defaults(func=cmd_query)

    p = sub.add_parser("cut", help="certified cut decision for one polynomial")
    p.add_argument("--poly", required=True)
    p.add_argument("--box", help='box JSON, e.g. {"lower": ["0"], "side": "1"} (default: unit box)')
    p.add_argument("--delta")
    p.add_argument("--depth-limit", type=int, default=DEFAULT_DEPTH_LIMIT)
    p.set_defaults(func=cmd_cut)

    p = sub.add_parser("consistency", help="does G = 0, H(u, X) = 0 have an integer solution?")
    p.add_argument("--instance")
    p.add_argument("--db")
    p.add_argument("--point", required=True)
    p.add_argument("--verify-delta", action="store_true")
    _add_build_flags(p)
    p.set_defaults(func=cmd_consistency)

    p = sub.add_parser("bounds", help="exact bound calculators")
    for name in ("n", "d", "h"):
        p.add_argument(f"--{name}", type=int, required=True)
    p.add_argument("--c", type=int, default=1, help="separation constant (non-normative default)")
    p.add_argument("--c-prime", type=int, default=1, help="coarseness constant (non-normative default)")
    p.add_argument("--digit-budget", type=int, default=None)
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("bench", help="query cost against the evaluate-everything baseline")
    p.add_argument("--db", required=True)
    p.add_argument("--points", help="file with one point per line")
    p.add_argument("--random", type=int, default=100, help="number of random points when --points is absent")
    p.add_argument("--verify-delta", action="store_true")
    p.add_argument("--per-query", action="store_true")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("selftest", help="quick oracle comparisons")
    p.set_defaults(func=cmd_selftest)
    return parser


def main(argv=None) -> int:
    parser = make_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except BudgetError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except (KeyError, TypeError) as exc:
        print(f"error: malformed input: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
