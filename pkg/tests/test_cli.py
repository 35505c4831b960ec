import json

import pytest

from monqfa.builders import build_basis_automaton
from monqfa.cli import main
from monqfa.dfa import Dfa, basis_dfa
from monqfa.qfa import MOnQFA


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out.strip(), err


def test_decide_exit_codes(capsys):
    code, out, _ = run(capsys, "decide", "(aa)*")
    assert code == 1 and "state 0, letter a" in out
    code, out, _ = run(capsys, "decide", ".*a.*b.*", "--alphabet", "ab", "--json")
    assert code == 0 and json.loads(out)["member"] is True
    code, _, err = run(capsys, "decide", "(ab")
    assert code == 2 and "error" in err


def test_usage_errors(capsys):
    assert run(capsys, "frobnicate")[0] == 2
    assert run(capsys, "build-basis", "ab")[0] == 2  # missing --alphabet
    assert run(capsys, "simulate", "/nonexistent.json", "a")[0] == 2


def test_build_then_simulate(capsys, tmp_path):
    out_file = tmp_path / "A_ab.json"
    code, _, _ = run(capsys, "build-basis", "ab", "--alphabet", "ab", "-o", str(out_file))
    assert code == 0
    assert run(capsys, "simulate", str(out_file), "ab")[1] == "1/4"
    a_file = tmp_path / "A_a.json"
    run(capsys, "build-basis", "a", "--alphabet", "ab", "-o", str(a_file))
    assert run(capsys, "simulate", str(a_file), "a", "--exact")[1] == "1/2"
    code, out, _ = run(capsys, "simulate", str(out_file), "abab", "--branches", "--json")
    assert code == 0 and json.loads(out) == {"word": "abab", "probability": "5/16", "branches": "5/16",
                                             "agree": True, "accepted": True}


def test_written_files_round_trip(capsys, tmp_path):
    target = tmp_path / "basis.json"
    run(capsys, "build-basis", "aba", "--alphabet", "abc", "-o", str(target))
    loaded = MOnQFA.from_json(target.read_text())
    assert loaded.to_json() == build_basis_automaton("aba", ("a", "b", "c")).to_json()
    dfa_file = tmp_path / "f.json"
    run(capsys, "logic-compile", "fo(a,b)", "--alphabet", "ab", "-o", str(dfa_file))
    d = Dfa.from_json(dfa_file.read_text())
    assert Dfa.from_json(d.to_json()) == d


def test_exact_flag_rejects_floats(capsys, tmp_path):
    doc = build_basis_automaton("a", "ab").to_dict()
    doc["initial"] = [[1.0, 0.0], [0.0, 0.0]]
    f = tmp_path / "float.json"
    f.write_text(json.dumps(doc))
    assert run(capsys, "simulate", str(f), "a")[1] == "0.5"
    assert run(capsys, "simulate", str(f), "a", "--exact")[0] == 2


def test_combine(capsys, tmp_path):
    expr = tmp_path / "e.txt"
    expr.write_text('(had (basis "a") (basis "b"))')
    assert run(capsys, "combine", str(expr), "ab", "--alphabet", "ab")[1] == "1/4"
    qfa = tmp_path / "a.json"
    qfa.write_text(build_basis_automaton("a", "ab").to_json())
    doc = tmp_path / "e.json"
    doc.write_text(json.dumps({"alphabet": "ab", "expr": '(cvx 1/2 (qfa "a.json") (const 0))'}))
    assert run(capsys, "combine", str(doc), "a")[1] == "1/4"
    assert run(capsys, "combine", str(expr), "ab")[0] == 2  # alphabet unknown


def test_linrep(capsys, tmp_path):
    f = tmp_path / "a.json"
    f.write_text(build_basis_automaton("a", "ab").to_json())
    code, out, _ = run(capsys, "linrep", str(f), "--json")
    data = json.loads(out)
    assert code == 0 and all(data["checks"].values())
    assert len(data["xi"]) == 4


def test_monoid_variation_and_dfa_files(capsys, tmp_path):
    f = tmp_path / "d.json"
    f.write_text(basis_dfa("aba", "ab").to_json())
    assert run(capsys, "variation", str(f))[1] == "3"
    assert run(capsys, "variation", "(aa)*")[1] == "infinite"
    code, out, _ = run(capsys, "monoid", "(aa)*", "--json")
    rep = json.loads(out)
    assert code == 0 and rep["size"] == 2 and rep["trivial"]["J"] is False


def test_synthesize(capsys):
    code, out, _ = run(capsys, "synthesize", ".*a.*", "--alphabet", "ab", "--check-len", "6", "--json")
    data = json.loads(out)
    assert code == 0 and data["agrees"] and data["expression"] == "L[a]"
    assert data["measured_isolation"] >= float(data["declared_isolation"])
    assert run(capsys, "synthesize", "(aa)*")[0] == 1


def test_check_invariants_is_deterministic(capsys):
    first = run(capsys, "check-invariants", "--seed", "4", "--samples", "40", "--json")
    second = run(capsys, "check-invariants", "--seed", "4", "--samples", "40", "--json")
    assert first == second and first[0] == 0
    assert all(c["ok"] for c in json.loads(first[1])["checks"])


@pytest.mark.parametrize("formula,word,accepted", [("ltl({a},{b})", "aab", True), ("!fo(a)", "bbb", True)])
def test_logic_compile(capsys, formula, word, accepted):
    code, out, _ = run(capsys, "logic-compile", formula, "--alphabet", "ab")
    assert code == 0 and Dfa.from_json(out).accepts(word) == accepted
