import json

import pytest

from signdb.cli import main

X_HALF = {"n": 1, "terms": [{"e": [1], "c": "2"}, {"e": [0], "c": "-1"}]}
X_PLUS = {"n": 1, "terms": [{"e": [1], "c": "1"}, {"e": [0], "c": "1"}]}
H_LIN = {"inputs": 2, "code": [["in", 0], ["in", 1], ["sub", 0, 1]], "out": [2]}


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr().out
    return code, out


def last_json(out):
    return json.loads(out.strip().splitlines()[-1])


def test_cut(capsys):
    code, out = run(capsys, "cut", "--poly", json.dumps(X_HALF))
    assert code == 0
    assert last_json(out) == {"status": "cuts", "witness_a": ["0"], "witness_b": ["1"], "signs": [-1, 1]}


def test_cut_with_box_and_delta(capsys, tmp_path):
    box = tmp_path / "box.json"
    box.write_text(json.dumps({"lower": ["0"], "side": "3/8"}))
    code, out = run(capsys, "cut", "--poly", json.dumps(X_PLUS), "--box", box, "--delta", json.dumps(X_HALF))
    assert code == 0 and last_json(out) == {"status": "empty_region"}


def test_bounds(capsys):
    code, out = run(capsys, "bounds", "--n", 1, "--d", 2, "--h", 1, "--c-prime", 1)
    assert code == 0 and last_json(out)["coarseness_log2"] == "-1"
    code, out = run(capsys, "bounds", "--n", 2, "--d", 2, "--h", 1)
    assert last_json(out)["family_cardinality_log2"] == "9"
    assert run(capsys, "bounds", "--n", 9, "--d", 9, "--h", 9, "--c-prime", 9)[0] == 3
    assert run(capsys, "bounds", "--n", 1, "--d", 2, "--h", 0)[0] == 4


def test_build_query_bench(capsys, tmp_path):
    db = tmp_path / "f.db"
    fam = json.dumps([X_HALF, X_PLUS])
    code, out = run(capsys, "build", "--family", fam, "--k", 1, "--out", db)
    assert code == 0 and last_json(out)["max_cutting"] <= 1
    code, out = run(capsys, "query", "--db", db, "--point", "1/2", "--naive")
    rep = last_json(out)
    assert code == 0 and rep["match"] and rep["signs"] == [0, 1]
    code, out = run(capsys, "query", "--db", db, "--point", "3/4")
    assert last_json(out)["signs"] == [1, 1]
    assert run(capsys, "query", "--db", db, "--point", "1/0,2")[0] == 2
    assert run(capsys, "query", "--db", db, "--point", "3/2")[0] == 4
    code, out = run(capsys, "--seed", 4, "bench", "--db", db, "--random", 10)
    assert code == 0 and last_json(out)["queries"] == 10


def test_bench_fixed_sign_family(capsys, tmp_path):
    db = tmp_path / "p.db"
    run(capsys, "build", "--family", json.dumps([X_PLUS]), "--out", db)
    pts = tmp_path / "pts.txt"
    pts.write_text("0\n1/3\n1\n")
    code, out = run(capsys, "bench", "--db", db, "--points", pts)
    rep = last_json(out)
    assert code == 0 and rep["arith_ops_total"] == 0 and rep["naive_ops_per_query"] == 1


def test_query_at_fixed_sign_cell_costs_nothing(capsys, tmp_path):
    db = tmp_path / "u.db"
    run(capsys, "build", "--family", json.dumps([X_PLUS]), "--mode", "uniform", "--grid-log2", 2, "--out", db)
    code, out = run(capsys, "query", "--db", db, "--point", "1/5")
    assert last_json(out)["stats"]["arith_ops"] == 0


def test_build_errors(capsys, tmp_path):
    db = tmp_path / "x.db"
    big = ("build", "--family", json.dumps([X_HALF]), "--mode", "uniform", "--grid-log2", 30, "--out", db)
    assert run(capsys, *big)[0] == 3
    assert not db.exists()
    assert run(capsys, "build", "--family", "{not json", "--out", db)[0] == 2
    assert run(capsys, "build", "--family", str(tmp_path / "missing.json"), "--out", db)[0] == 2
    bad = tmp_path / "bad.db"
    bad.write_text('{"version": 1')
    assert run(capsys, "query", "--db", bad, "--point", "0")[0] == 2


def test_powersum_instance_build(capsys, tmp_path):
    db = tmp_path / "e2.db"
    inst = json.dumps({"m": 2, "n": 2, "H": "powersum", "zeros": "boolean-cube", "delta": "vandermonde"})
    code, out = run(capsys, "build", "--instance", inst, "--k", 2, "--out", db)
    assert code == 0 and last_json(out)["degenerate"] == 0
    code, out = run(capsys, "consistency", "--db", db, "--point", "1/3,2/3")
    assert code == 0 and "consistent: false" in out


def test_consistency(capsys):
    inst = json.dumps({"m": 1, "n": 1, "H": H_LIN, "zeros": [[0], [1]]})
    code, out = run(capsys, "consistency", "--instance", inst, "--point", "1")
    assert code == 0 and out.splitlines()[0] == "consistent: true"
    code, out = run(capsys, "consistency", "--instance", inst, "--point", "1/2")
    assert out.splitlines()[0] == "consistent: false"
    assert run(capsys, "consistency", "--point", "1")[0] == 2


def test_selftest(capsys):
    code, out = run(capsys, "selftest")
    assert code == 0 and "FAIL" not in out


def test_determinism(capsys, tmp_path):
    fam = json.dumps([X_HALF, X_PLUS])
    a, b = tmp_path / "a.db", tmp_path / "b.db"
    run(capsys, "build", "--family", fam, "--out", a)
    run(capsys, "build", "--family", fam, "--out", b)
    assert a.read_bytes() == b.read_bytes()


def test_missing_subcommand():
    with pytest.raises(SystemExit):
        main([])
