import json
import subprocess
import sys

import pytest

from monodelta import epl_source
from monodelta.cli import run


@pytest.fixture
def epl_file(tmp_path):
    path = tmp_path / "epl.spl"
    path.write_text(epl_source(), encoding="utf-8")
    return str(path)


def test_check_ok(epl_file, capsys):
    assert run(["check", epl_file]) == 0
    assert capsys.readouterr().out.strip() == "ok"


def test_check_ambiguous(tmp_path, capsys):
    path = tmp_path / "amb.spl"
    path.write_text(
        "features A; base { class C extends Object { } }\n"
        "delta D1 when A { modifies C { adds int f; } }\n"
        "delta D2 when A { modifies C { adds int f; } }\n"
        "order { D1, D2 };"
    )
    assert run(["check", str(path)]) == 1
    assert "ambiguous" in capsys.readouterr().out
    assert run(["refactor", str(path), "--direction", "inc"]) == 1
    assert "refusing" in capsys.readouterr().err


def test_products(epl_file, capsys):
    assert run(["products", epl_file]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert len(lines) == 12
    assert "{Lit, Print}" in lines


def test_generate(epl_file, capsys):
    assert run(["generate", epl_file, "--product", "Lit,Print,Neg"]) == 0
    out = capsys.readouterr().out
    assert "class Neg extends Exp" in out and "class Add" not in out


def test_generate_invalid_product(epl_file, capsys):
    assert run(["generate", epl_file, "--product", "Lit"]) == 2
    assert run(["generate", epl_file, "--product", "Lit,Print,Nope"]) == 2
    assert "unknown feature Nope" in capsys.readouterr().err


def test_refactor_round_trip(epl_file, tmp_path, capsys):
    for direction in ("inc", "dec"):
        out = str(tmp_path / f"{direction}.spl")
        assert run(["refactor", epl_file, "--direction", direction, "-o", out]) == 0
        assert run(["equiv", epl_file, out]) == 0
        assert capsys.readouterr().out.strip().endswith("equivalent (12 products)")


def test_refactor_cleanup_drops_empty(epl_file, capsys):
    assert run(["refactor", epl_file, "--direction", "dec", "--cleanup"]) == 0
    assert "delta DNeg when" not in capsys.readouterr().out


def test_classify_json(epl_file, capsys):
    assert run(["classify", "--json", epl_file]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["pseudo-increasing"]["holds"] is False
    assert doc["increasing"]["violations"][0]["delta"] == "DremAdd"


def test_project_and_equiv_mismatch(epl_file, tmp_path, capsys):
    out = str(tmp_path / "proj.spl")
    assert run(["project", epl_file, "--keep", "!Neg", "-o", out]) == 0
    assert run(["equiv", "--json", epl_file, out]) == 1
    doc = json.loads(capsys.readouterr().out)
    assert doc["equivalent"] is False and len(doc["witnesses"]) == 6


def test_parse_error_reports_position(tmp_path, capsys):
    path = tmp_path / "bad.spl"
    path.write_text("features A;\nbase { class }\n")
    assert run(["check", str(path)]) == 2
    err = capsys.readouterr().err
    assert err.startswith(f"monodelta: {path}:2:")


def test_missing_file(capsys):
    assert run(["check", "/nonexistent.spl"]) == 2
    assert "monodelta:" in capsys.readouterr().err


def test_usage_error():
    assert run(["refactor"]) == 2
    assert run(["check", "x", "--json", "--text"]) == 2


def test_env_selects_json(epl_file, capsys, monkeypatch):
    monkeypatch.setenv("MONODELTA_FORMAT", "json")
    assert run(["check", epl_file]) == 0
    assert json.loads(capsys.readouterr().out)["unambiguous"] is True
    assert run(["check", "--text", epl_file]) == 0
    assert capsys.readouterr().out.strip() == "ok"


def test_fuzz(capsys):
    assert run(["fuzz", "--count", "5", "--json"]) == 0
    assert json.loads(capsys.readouterr().out) == {"checked": 5, "failure": None}


def test_module_entry_point(epl_file):
    proc = subprocess.run([sys.executable, "-m", "monodelta", "products", epl_file],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert len(proc.stdout.splitlines()) == 12


def test_generate_base_product_prints_base(epl_file, capsys):
    from monodelta import load_epl
    from monodelta.syntax import print_program

    assert run(["generate", epl_file, "--product", "Lit,Print,Add"]) == 0
    assert capsys.readouterr().out == print_program(load_epl().base)
