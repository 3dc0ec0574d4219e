import json
import subprocess
import sys

import pytest

from mumall.cli import main
from mumall.fixtures import FIXTURES, bad_backedge
from mumall.proof import load_proof, save_proof, tree_from_json, validate_tree
from mumall.reduce import count_cuts


@pytest.fixture
def bad_file(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text(json.dumps(save_proof(bad_backedge())))
    return str(p)


def test_check_fixtures():
    for name in FIXTURES:
        assert main(["check", f"fixture:{name}"]) == 0


def test_check_reports_defects(bad_file, capsys):
    assert main(["check", bad_file]) == 1
    err = capsys.readouterr().err
    defects = json.loads(err[:err.rindex("]") + 1])
    assert len(defects) == 1 and defects[0]["node"] == "a"


def test_progress_verdicts(capsys):
    assert main(["progress", "fixture:centre_nu"]) == 0
    assert main(["progress", "fixture:left", "--oracle"]) == 1
    out = capsys.readouterr().out
    doc = json.loads(out[out.rindex('{\n  "verdict"'):])
    assert doc["verdict"]["counterexample"]["loop"] == ["m"]
    assert doc["oracle"]["progressing"] is False


def test_identity_command(tmp_path):
    out = tmp_path / "id.json"
    assert main(["id", "--formula", "mu X. X", "-o", str(out)]) == 0
    g = load_proof(out.read_text())
    assert len(g.nodes) == 2
    assert main(["check", str(out)]) == 0
    assert main(["progress", str(out)]) == 0
    assert main(["id", "--formula", "X * 1"]) == 1


def test_identity_dot(capsys):
    main(["id", "--formula", "1", "--format", "dot"])
    assert capsys.readouterr().out.startswith("digraph")


def test_normalize(tmp_path):
    out, log = tmp_path / "prefix.json", tmp_path / "events.jsonl"
    code = main(["normalize", "fixture:cut_loop", "--depth", "8", "--emit", str(out),
                 "--events", str(log)])
    assert code == 0
    t = tree_from_json(json.loads(out.read_text()))
    assert count_cuts(t) == 0 and validate_tree(t) == []
    assert main(["check", str(out)]) == 0
    assert all(json.loads(l)["kind"] for l in log.read_text().splitlines())


def test_normalize_budget(capsys):
    assert main(["normalize", "fixture:left", "--budget", "50"]) == 3
    err = capsys.readouterr().err
    assert json.loads(err.splitlines()[0])["depthLog"] == [0] * 50


def test_ic_verify(capsys):
    assert main(["ic-verify", "fixture:ic_case1", "--subgraph", "r,l,m"]) == 0
    assert main(["ic-verify", "fixture:ic_case1", "--subgraph", '["r", "l"]']) == 1
    assert main(["ic-verify", "fixture:ic_case1", "--subgraph", "l"]) == 1
    assert main(["ic-verify", "fixture:external", "--witness"]) == 0
    out = capsys.readouterr().out
    assert '"externalWitness": {' in out


def test_covering_selectors(capsys):
    seen = []
    for sel in ("first", "last", "alternate"):
        capsys.readouterr()
        assert main(["covering", "fixture:ic_case4", "--steps", "200", "--path", sel]) == 0
        seen.append(tuple(json.loads(capsys.readouterr().out)["subgraph"]))
    assert len(set(seen)) == 3


def test_random_is_seeded(capsys):
    main(["--seed", "5", "random"])
    a = capsys.readouterr().out
    main(["--seed", "5", "random"])
    assert capsys.readouterr().out == a
    assert load_proof(a)


def test_fixture_dump(tmp_path):
    assert main(["fixtures", "--out", str(tmp_path)]) == 0
    assert len(list(tmp_path.glob("*.json"))) == len(FIXTURES)


def test_missing_file():
    assert main(["check", "/nonexistent.json"]) == 1


def test_console_entry_point():
    r = subprocess.run([sys.executable, "-m", "mumall.cli", "check", "fixture:id_1"],
                       capture_output=True, text=True, env={"MUMALL_COLOR": "0", "PATH": ""})
    assert r.returncode == 0
    assert "\x1b[" not in r.stderr
