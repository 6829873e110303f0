import json
import os
from pathlib import Path

import pytest

from pkit import cli
from pkit.errors import ValidationInconclusive

GOLDEN = Path(__file__).parent / "golden"

WS = """
poset P { elements: a, b, c; order: a < c, b < c; }
space myz2 {
  part main: 1; part y: 0;
  order main(a) <= main(b) := a == b | a == omega;
  order main(a) <= y() := a == omega;
}
set tail = box(main, 3..)
"""


@pytest.fixture
def wsfile(tmp_path):
    p = tmp_path / "ws.pk"
    p.write_text(WS)
    return str(p)


def run(capsys, *argv):
    code = cli.main(list(argv) + ["--json"])
    out = capsys.readouterr().out
    rep = json.loads(out)
    assert rep["schema"] == cli.SCHEMA and rep["exit_code"] == code
    return code, rep


def strip(rep):
    rep = dict(rep)
    rep.pop("timing", None)
    rep.pop("command", None)
    if isinstance(rep.get("result"), list):
        rep["result"] = [{k: v for k, v in r.items() if k != "seconds"} for r in rep["result"]]
    return rep


def golden(name, rep):
    path = GOLDEN / f"{name}.json"
    got = strip(rep)
    if os.environ.get("PKIT_REGEN_GOLDEN"):
        path.write_text(json.dumps(got, indent=2, ensure_ascii=False) + "\n")
    assert got == json.loads(path.read_text())


@pytest.mark.parametrize("argv,code,verdict", [
    (["check", "Z1"], 1, "fails"),
    (["check", "E2"], 0, "holds"),
    (["check", "E1", "--property", "bi-heyting"], 0, "holds"),
    (["check", "Z3", "--property", "p-space"], 1, "fails"),
    (["check", "dual(Z2)", "--property", "co-heyting"], 1, "fails"),
    (["check", "Z2", "--property", "priestley"], 0, "holds"),
    (["find-config", "grid"], 0, "none"),
    (["find-config", "Z2"], 1, "found"),
    (["find-config", "Z3", "--p"], 1, "found"),
    (["implies", "Z1", "-a", "all", "-b", "none"], 0, "exists"),
    (["implies", "Z1", "-a", "in(y)", "-b", "none"], 1, "not-exists"),
    (["dsum-check", "antichain_fan", "-d", "limit"], 1, "fails"),
    (["dsum-check", "chain_fan", "-d", "box(main,3..)"], 0, "holds"),
    (["dual", "Z1", "--window", "1"], 0, "ok"),
    (["oracle", "--sweep", "ifp", "--max-size", "1"], 0, "pass"),
    (["render", "Z1", "--depth", "1"], 0, "ok"),
    (["check", "Q"], 2, "error"),
    (["implies", "Z1", "-a", "in(main)", "-b", "none"], 2, "error"),
    (["dsum-check", "Z1", "-d", "in(y)"], 2, "error"),
])
def test_exit_codes(capsys, argv, code, verdict):
    got, rep = run(capsys, *argv)
    assert got == code and rep["verdict"] == verdict


@pytest.mark.parametrize("name,argv", [
    ("check_z1", ["check", "Z1"]),
    ("check_e2", ["check", "E2"]),
    ("find_config_z2", ["find-config", "Z2"]),
    ("find_config_grid", ["find-config", "grid"]),
    ("dual_z1_w1", ["dual", "Z1", "--window", "1"]),
    ("implies_z1", ["implies", "Z1", "-a", "in(y)", "-b", "none"]),
    ("dsum_check_fan", ["dsum-check", "antichain_fan", "-d", "limit"]),
    ("oracle_birkhoff_2", ["oracle", "--sweep", "birkhoff", "--max-size", "2"]),
    ("render_point", ["render", "point"]),
    ("error_unknown", ["check", "Q"]),
])
def test_golden_reports(capsys, name, argv):
    _, rep = run(capsys, *argv)
    golden(name, rep)


def test_workspace_files(capsys, wsfile):
    code, rep = run(capsys, "find-config", "myz2", wsfile)
    assert code == 1 and rep["witness"]["pattern"] == 2 and rep["witness"]["verified"]
    code, rep = run(capsys, "dsum-check", "chain_fan", "-d", "tail", wsfile)
    assert code == 0 and rep["result"]["D_clopen"]
    code, rep = run(capsys, "render", "P", wsfile, "--kind", "lattice")
    assert code == 0 and rep["result"]["dot"].count("->") == 5


def test_global_and_local_flags(capsys):
    code, rep = run(capsys, "--window", "7", "--no-cross-check", "check", "Z1")
    assert code == 1 and rep["engine"] == {"window": 7, "cross_check": False, "cross_level": None}
    code, rep = run(capsys, "check", "Z1", "--window", "7")
    assert rep["engine"] == {"window": 7, "cross_check": True, "cross_level": 18}
    code, rep = run(capsys, "check", "Z1", "/dev/null", "--no-cross-check")
    assert rep["engine"]["cross_check"] is False


def test_env_window_is_validated(capsys, monkeypatch):
    monkeypatch.setenv("PKIT_WINDOW", "2")
    code, rep = run(capsys, "check", "Z1")
    assert code == 2 and "below the window bound" in rep["error"]["message"]
    monkeypatch.setenv("PKIT_WINDOW", "8")
    code, rep = run(capsys, "check", "Z1")
    assert code == 1 and rep["engine"]["window"] == 8


def test_inconclusive_maps_to_exit_3(capsys, monkeypatch):
    def boom(*a, **k):
        raise ValidationInconclusive("levels disagree")
    monkeypatch.setattr(cli, "is_esakia", boom)
    code, rep = run(capsys, "check", "Z1")
    assert code == 3 and rep["verdict"] == "inconclusive"


def test_argparse_errors_and_text_output(capsys):
    assert cli.main(["check"]) == 2
    assert cli.main(["frobnicate"]) == 2
    capsys.readouterr()
    assert cli.main(["check", "Z1"]) == 1
    out = capsys.readouterr().out
    assert "in(y)" in out and not out.lstrip().startswith("{")
    assert cli.main(["render", "point"]) == 0
    assert capsys.readouterr().out.startswith('digraph "point"')


def test_missing_file(capsys):
    code, rep = run(capsys, "check", "Z1", "/nonexistent/file.pk")
    assert code == 2 and rep["verdict"] == "error"
