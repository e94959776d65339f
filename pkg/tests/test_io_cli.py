import json

import numpy as np
import pytest

from modular_orbifold import io
from modular_orbifold.branching import branching_su_to_spin
from modular_orbifold.cli import main
from modular_orbifold.families import build_a1_level_k, build_orbifold_u1, build_spin_m_level2, build_u1
from modular_orbifold.mtc_core import trivial_theory
from modular_orbifold.orbifold_solver import spin_problem


@pytest.mark.parametrize("md", [build_spin_m_level2(3), build_u1(6), build_a1_level_k(4), trivial_theory()],
                         ids=lambda m: m.name)
def test_modular_round_trip_bytes(md):
    text = io.dumps_modular(md)
    back = io.loads_modular(text)
    assert back == md
    assert io.dumps_modular(back) == text


def test_seventeen_digits():
    doc = json.loads(io.dumps_modular(build_u1(2)))
    assert set(doc) == {"name", "labels", "vacuum", "S", "twists", "phaseC"}
    assert "0.70710678118654746" in io.dumps_modular(build_u1(2))


def test_reader_accepts_low_precision():
    md = io.modular_from_doc({"name": "t", "labels": ["1"], "vacuum": 0, "S": [[[1, 0]]], "twists": [[1, 0]],
                              "phaseC": [1, 0]})
    assert md.S[0, 0] == 1


def test_branching_round_trip():
    b = branching_su_to_spin(4)
    doc = json.loads(io.dumps(io.branching_to_doc(b)))
    assert {"parent", "child", "group_order", "b"} <= set(doc)
    assert io.branching_from_doc(doc) == b


def test_problem_round_trip():
    p = spin_problem(3)
    text = io.dumps(io.problem_to_doc(p))
    assert io.dumps(io.problem_to_doc(io.problem_from_doc(json.loads(text)))) == text


@pytest.mark.parametrize("doc", [{}, {"name": "x"}, {"name": "x", "labels": ["a"], "vacuum": 0, "S": [[1]],
                                                      "twists": [[1, 0]], "phaseC": [1, 0]}])
def test_malformed_documents(doc):
    with pytest.raises(io.DocumentError):
        io.modular_from_doc(doc)


# --- CLI -------------------------------------------------------------------


def run(*args):
    return main([str(a) for a in args])


def test_build_and_verify(tmp_path, capsys):
    out = tmp_path / "o3.json"
    assert run("build", "orbifold_u1", 3, "-o", out) == 0
    text = capsys.readouterr().out
    assert "10 sectors" in text and "mu = 24" in text
    assert len(io.read_modular(out)) == 10
    assert run("verify", out) == 0


def test_build_u1_2(tmp_path):
    out = tmp_path / "u.json"
    assert run("build", "u1", 2, "-o", out) == 0
    assert len(io.read_modular(out)) == 2


def test_build_stdout(capsys):
    assert run("build", "a1", 2) == 0
    assert json.loads(capsys.readouterr().out)["name"] == "a1(2)"


@pytest.mark.parametrize("args", [("build", "spin_level2", 2), ("build", "nope", 3), ("build", "u1", "x"),
                                  ("build", "u1", 3), (), ("verify",), ("frobnicate",)])
def test_usage_errors(args):
    assert run(*args) == 2


def test_verify_corrupted(tmp_path):
    doc = io.modular_to_doc(build_spin_m_level2(5))
    doc["S"][3][4] = [0.5, 0.1]
    p = tmp_path / "bad.json"
    p.write_text(json.dumps(doc))
    assert run("verify", p) == 1


def test_verify_trivial(tmp_path):
    p = tmp_path / "t.json"
    io.write_modular(p, trivial_theory())
    assert run("verify", p) == 0


def test_verify_bad_json(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text("{not json")
    assert run("verify", p) == 2
    assert run("verify", tmp_path / "missing.json") == 2


def test_verify_json_flag(tmp_path, capsys):
    p = tmp_path / "u.json"
    io.write_modular(p, build_u1(4))
    capsys.readouterr()
    assert run("verify", p, "--json") == 0
    assert json.loads(capsys.readouterr().out)["passed"] is True


def test_tolerance_flags(tmp_path):
    p = tmp_path / "u.json"
    io.write_modular(p, build_u1(4))
    assert run("verify", p, "--tolerance", "1e-30") == 1
    assert run("verify", p, "--tolerance", "-1") == 2
    assert run("verify", p, "--int-tolerance", "1e-3") == 0


def test_fusion(tmp_path, capsys):
    p = tmp_path / "a.json"
    io.write_modular(p, build_a1_level_k(2))
    capsys.readouterr()
    assert run("fusion", p) == 0
    assert "spin_1/2 x spin_1/2 = spin_0 + spin_1" in capsys.readouterr().out


def test_fusion_failure(tmp_path):
    md = build_u1(4)
    doc = io.modular_to_doc(md)
    doc["S"][1][1] = [0.3, 0.2]
    p = tmp_path / "f.json"
    p.write_text(json.dumps(doc))
    assert run("fusion", p) == 1


@pytest.mark.parametrize("l", [3, 4])
def test_solve_and_compare(tmp_path, l):
    sol, prob, ref = tmp_path / "sol.json", tmp_path / "prob.json", tmp_path / "ref.json"
    assert run("solve", "--family", "spin_level2", "--param", l, "-o", sol, "--emit-problem", prob) == 0
    assert len(json.loads(sol.read_text())["solutions"]) == 1
    assert run("build", "spin_level2", l, "-o", ref) == 0
    assert run("compare", sol, ref, "--allow-permutation") == 0
    assert run("solve", prob, "-o", tmp_path / "again.json") == 0
    assert (tmp_path / "again.json").read_text() == sol.read_text()


def test_solve_corrupted_problem(tmp_path):
    prob = tmp_path / "p.json"
    doc = io.problem_to_doc(spin_problem(3))
    doc["twisted"][0]["twist"] = [0.0, -1.0]
    prob.write_text(json.dumps(doc))
    assert run("solve", prob) == 1
    doc["twisted"] = doc["twisted"][1:]
    prob.write_text(json.dumps(doc))
    assert run("solve", prob) == 2
    assert run("solve") == 2


def test_compare(tmp_path):
    paths = {}
    for fam, p in (("u1", 2), ("a1", 1), ("u1", 6), ("u1", 8)):
        paths[(fam, p)] = tmp_path / f"{fam}{p}.json"
        assert run("build", fam, p, "-o", paths[(fam, p)]) == 0
    assert run("compare", paths[("u1", 2)], paths[("a1", 1)]) == 0
    assert run("compare", paths[("u1", 6)], paths[("u1", 8)]) == 1


def test_compare_permutation(tmp_path):
    from modular_orbifold.mtc_core import permute

    md = build_orbifold_u1(3)
    order = [0, 1, 3, 2, 5, 4, 9, 8, 7, 6]
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    io.write_modular(a, md)
    io.write_modular(b, permute(md, order))
    assert run("compare", a, b) == 1
    assert run("compare", a, b, "--allow-permutation") == 0


def test_report(capsys):
    assert run("report", "spin_level2", 4) == 0
    out = capsys.readouterr().out
    assert "rejected" in out and "2l" in out and "dim W: 10" in out
    assert run("report", "orbifold_u1", 3, "--json") == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["twisted"] == ["sigma_1", "sigma_2", "tau_1", "tau_2"]


def test_deterministic_bytes(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    run("build", "spin_level2", 6, "-o", a)
    run("build", "spin_level2", 6, "-o", b)
    assert a.read_bytes() == b.read_bytes()


def test_module_entry_point():
    import subprocess
    import sys

    r = subprocess.run([sys.executable, "-m", "modular_orbifold", "build", "u1", "3"], capture_output=True)
    assert r.returncode == 2
