from __future__ import annotations

import json

import numpy as np
import pytest

from irrquiver import cli
from irrquiver.cli import EXIT_OK, EXIT_PARSE, EXIT_RESOURCE, EXIT_SEMANTIC, EXIT_VERIFY, main
from irrquiver.exact import CQ
from irrquiver.quiver_rep import QuiverRep
from irrquiver.specfile import SpecError, SpecParseError, load_spec, parse_spec
from irrquiver.verify import run_verification

from conftest import DATA, SPECS

ALL_SPECS = sorted(SPECS.glob("*.json"))


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def write(tmp_path, doc, name="spec.json"):
    p = tmp_path / name
    p.write_text(doc if isinstance(doc, str) else json.dumps(doc))
    return p


# spec parsing ----------------------------------------------------------------

def test_p4_connection_spec():
    spec = load_spec(SPECS / "p4.json")
    assert spec.kind == "connection"
    assert spec.graph.edge_count == 3
    assert spec.dims == {"p": 1, "u": 1, "v": 1}
    assert sum(spec.params[n] * spec.dims[n] for n in spec.dims) == 0


def test_a2pp_quiver_spec():
    spec = load_spec(SPECS / "a2pp.json")
    assert spec.kind == "quiver"
    assert spec.dims == {"1": 1, "2": 2, "3": 2, "4": 1}
    assert spec.params["2"] == CQ(1) / 2
    assert spec.graph.edge_count == 4


def test_invalid_json_is_parse_error():
    with pytest.raises(SpecParseError):
        parse_spec("{not json")


@pytest.mark.parametrize("doc", [
    [],
    {},
    {"quiver": {"parts": [["a"], ["b"]]}, "poles": []},
    {"quiver": {"parts": [["a"], ["b"]], "dims": {"a": 1}}},
    {"quiver": {"parts": [["a"], ["b"]], "dims": {"a": 1, "b": 1}, "params": {"a": 0.5, "b": "0"}}},
    {"quiver": {"parts": [["a"], ["b"]], "dims": {"a": -1, "b": 1}}},
    {"poles": [{"parts": []}]},
])
def test_semantic_errors(doc):
    with pytest.raises(SpecError):
        parse_spec(json.dumps(doc))


def test_declared_order_mismatch_is_noted():
    doc = json.loads((SPECS / "p4.json").read_text())
    doc["poles"][0]["order"] = 2
    spec = parse_spec(json.dumps(doc))
    assert any("order" in n for n in spec.notes)


# exit codes --------------------------------------------------------------------

def test_exit_parse_on_bad_json(tmp_path, capsys):
    code, _, err = run(capsys, "analyze", "--spec", write(tmp_path, "{"))
    assert code == EXIT_PARSE and "error" in err


def test_exit_parse_on_missing_file(tmp_path, capsys):
    code, _, _ = run(capsys, "analyze", "--spec", tmp_path / "absent.json")
    assert code == EXIT_PARSE


def test_exit_semantic(tmp_path, capsys):
    code, _, _ = run(capsys, "analyze", "--spec", write(tmp_path, {"quiver": {}}))
    assert code == EXIT_SEMANTIC


def test_exit_semantic_on_unknown_word_node(capsys):
    code, _, _ = run(capsys, "reflect", "--spec", SPECS / "a2pp.json", "--word", "9")
    assert code == EXIT_SEMANTIC


def test_exit_resource(tmp_path, capsys):
    doc = {"quiver": {"parts": [["a"], ["b"], ["c"], ["d"]],
                      "dims": {n: 40 for n in "abcd"}, "params": {n: "0" for n in "abcd"}}}
    code, _, err = run(capsys, "analyze", "--spec", write(tmp_path, doc))
    assert code == EXIT_RESOURCE and "resource" in err


def test_exit_verify_on_tampered_moment_map(monkeypatch, capsys):
    def scramble(rep: QuiverRep) -> QuiverRep:
        phi = {e: m * 2 for e, m in rep.phi.items()}
        node = next(iter(rep.quiver.nodes))
        out = QuiverRep(rep.quiver, rep.dims, phi, rep.phi_star)
        # breaks equivariance by acting on one node only
        return out.act({n: (2 * np.eye(k) if n == node else np.eye(k)) for n, k in rep.dims.items()})

    real = cli.run_verification
    monkeypatch.setattr(cli, "run_verification", lambda s, seed, trials: real(s, seed, trials, tamper=scramble))
    code, out, _ = run(capsys, "verify", "--spec", SPECS / "p4.json", "--trials", 2)
    assert code == EXIT_VERIFY and "FAIL" in out


@pytest.mark.parametrize("path", ALL_SPECS, ids=lambda p: p.stem)
def test_verify_bundled_specs_pass(path, capsys):
    code, out, _ = run(capsys, "verify", "--spec", path, "--trials", 2, "--json")
    report = json.loads(out)
    assert code == EXIT_OK and report["passed"], report


def test_verify_zero_trials(capsys):
    code, out, _ = run(capsys, "verify", "--spec", SPECS / "p4.json", "--trials", 0, "--json")
    assert code == EXIT_OK and json.loads(out)["checks"] == []
    assert run_verification(load_spec(SPECS / "p4.json"), trials=0) == []


# outputs ---------------------------------------------------------------------

@pytest.mark.parametrize("cmd", ["analyze", "readings", "dot", "verify"])
def test_output_is_deterministic(cmd, capsys):
    argv = [cmd, "--spec", SPECS / "gamma221.json"]
    first = run(capsys, *argv)[1]
    assert first and run(capsys, *argv)[1] == first


def test_out_file(tmp_path, capsys):
    target = tmp_path / "o.txt"
    code, out, _ = run(capsys, "analyze", "--spec", SPECS / "p4.json", "--out", target)
    assert code == EXIT_OK and out == "" and target.read_text()


def test_analyze_json_fields(capsys):
    code, out, _ = run(capsys, "analyze", "--spec", SPECS / "p4.json", "--json")
    report = json.loads(out)
    assert code == EXIT_OK
    assert report["delta"] == 2
    assert report["existence"]["stable"] is True


@pytest.mark.parametrize("stem", ["a2pp", "tetrahedron", "gamma221"])
def test_readings_golden(stem, capsys):
    code, out, _ = run(capsys, "readings", "--spec", SPECS / f"{stem}.json", "--json")
    assert code == EXIT_OK
    assert json.loads(out) == json.loads((DATA / f"readings_{stem}.json").read_text())


def _dot_edges(text):
    return sorted(line.strip().rstrip(";") for line in text.splitlines() if "--" in line)


def test_dot_triangle(tmp_path, capsys):
    doc = {"quiver": {"parts": [["1"], ["2"], ["3"]], "dims": {"1": 1, "2": 1, "3": 1}}}
    code, out, _ = run(capsys, "dot", "--spec", write(tmp_path, doc))
    assert code == EXIT_OK and out.startswith("graph ")
    assert _dot_edges(out) == ['"1" -- "2"', '"1" -- "3"', '"2" -- "3"']


def test_dot_gamma22_is_four_cycle(tmp_path, capsys):
    doc = {"quiver": {"parts": [["a", "b"], ["c", "d"]], "dims": {n: 1 for n in "abcd"}}}
    code, out, _ = run(capsys, "dot", "--spec", write(tmp_path, doc))
    assert _dot_edges(out) == ['"a" -- "c"', '"a" -- "d"', '"b" -- "c"', '"b" -- "d"']


def test_dot_a2pp(capsys):
    code, out, _ = run(capsys, "dot", "--spec", SPECS / "a2pp.json")
    assert len(_dot_edges(out)) == 4
    assert '"1" [shape=box]' in out and '"2" [group=part1]' in out


def test_reflect_chain(capsys):
    code, out, _ = run(capsys, "reflect", "--spec", SPECS / "a2pp.json", "--word", "1 2 3", "--json")
    report = json.loads(out)
    assert code == EXIT_OK
    assert report["dims"] == {"1": 0, "2": 1, "3": 1, "4": 1}


@pytest.mark.parametrize("word", ["", "3 3", "3,3"])
def test_reflect_identity_words(word, capsys):
    code, out, _ = run(capsys, "reflect", "--spec", SPECS / "a2pp.json", "--word", word, "--json")
    report = json.loads(out)
    assert report["dims"] == {"1": 1, "2": 2, "3": 2, "4": 1}
    assert report["params"] == {"1": "1", "2": "1/2", "3": "-1/3", "4": "-4/3"}
