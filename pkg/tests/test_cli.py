from __future__ import annotations

import json
from pathlib import Path

import jsonschema
import pytest

from varsat.cli import main

SCHEMA = json.loads((Path(__file__).parent.parent / "schema" / "output.schema.json").read_text())


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def run_json(capsys, *argv):
    code, out, _ = run(capsys, *argv, "--json")
    doc = json.loads(out)
    jsonschema.validate(doc, SCHEMA)
    return code, doc


def test_check_natset(capsys):
    code, doc = run_json(capsys, "check", "natset.vsat")
    assert code == 0
    assert doc["verdict"] == "FVP" and doc["complexity"] == 20


def test_check_peano_bound(capsys):
    code, out, _ = run(capsys, "check", "peano.vsat")
    assert code == 2 and "not FVP" in out


def test_variants(capsys):
    code, doc = run_json(capsys, "variants", "bool.vsat", "x or y")
    assert code == 0 and len(doc["variants"]) == 3


def test_constructor_variants(capsys):
    code, doc = run_json(capsys, "variants", "natsetpreds", "odd(N)", "--constructor")
    assert code == 0 and 0 < len(doc["variants"])


def test_normalize(capsys):
    code, out, _ = run(capsys, "normalize", "natset", "max(1 + 1, 1)")
    assert code == 0 and "1 + 1" in out


def test_unify_exit_codes(capsys):
    assert run(capsys, "unify", "peanoctor", "s(x) = s(0)")[0] == 0
    assert run(capsys, "unify", "peanoctor", "s(x) = 0")[0] == 1


@pytest.mark.parametrize("argv, code, verdict", [
    (("valid", "natsetpreds", "odd(N) = tt <=> even(N) =/= tt"), 0, "Valid"),
    (("sat", "natsetpreds", "N > M =/= tt /\\ M > N =/= tt /\\ N =/= M"), 1, "Unsat"),
    (("sat", "peanoctor", "s(x) =/= s(y) /\\ 0 =/= y"), 0, "Sat"),
    (("valid", "peanoctor", "x = 0"), 1, "Invalid"),
    (("valid", "listsel", "l = nil \\/ l : NeList = tt"), 0, "Valid"),
])
def test_decisions(capsys, argv, code, verdict):
    got, doc = run_json(capsys, *argv, "--trace")
    assert got == code and doc["verdict"] == verdict
    assert doc["trace"] and set(doc["stats"]) >= {"nodes", "rewrites", "unifiers"}


def test_sat_witness_json(capsys):
    _, doc = run_json(capsys, "sat", "peanoctor", "s(x) =/= s(y) /\\ 0 =/= y")
    w = doc["witness"]
    assert set(w["ground"]) == {"x:Nat", "y:Nat"}
    assert w["ground"]["y:Nat"] != "0"


def test_trace_text(capsys):
    code, out, _ = run(capsys, "valid", "natsetpreds", "odd(N) = tt <=> even(N) =/= tt", "--trace")
    assert code == 0 and "eliminate" in out and "Valid" in out


def test_oracle_sat(capsys):
    assert run(capsys, "oracle-sat", "peanoctor", "s(x) =/= s(y)", "--depth", "1")[0] == 0
    assert run(capsys, "oracle-sat", "natsetpreds", "N > M =/= tt /\\ M > N =/= tt /\\ N =/= M",
               "--depth", "2")[0] == 1


def test_bound_exceeded_exit(capsys):
    code, doc = run_json(capsys, "sat", "peano", "x + y = 0")
    assert code == 2 and "error" in doc


def test_errors(capsys, tmp_path):
    assert run(capsys, "check", str(tmp_path / "missing.vsat"))[0] == 2
    bad = tmp_path / "bad.vsat"
    bad.write_text("theory X is sorts A . op f : A -> B [ctor] . endth\n")
    code, doc = run_json(capsys, "check", str(bad))
    assert code == 2 and doc["diagnostics"]
    assert run(capsys, "sat", "natsetpreds", "N =/= ")[0] == 2


def test_selectors_roundtrip(capsys, tmp_path):
    code, out, _ = run(capsys, "selectors", "lists", "--name", "LS")
    assert code == 0
    p = tmp_path / "ls.vsat"
    p.write_text(out)
    code, doc = run_json(capsys, "check", str(p))
    assert code == 0 and doc["verdict"] == "FVP"


def test_module_entry_point():
    import subprocess
    import sys
    r = subprocess.run([sys.executable, "-m", "varsat", "variants", "bool", "x or y"],
                       capture_output=True, text=True, timeout=60)
    assert r.returncode == 0
