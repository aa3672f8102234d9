import json
import subprocess
import sys

import pytest

from sato.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_kdv_residual_constant(capsys):
    code, out, _ = run(capsys, "kdv", "residual", "--beta", "5")
    assert code == 0 and out.strip() == "0"


def test_kdv_residual_jet(capsys):
    code, out, _ = run(capsys, "kdv", "residual", "--beta", "beta")
    assert code == 0 and "beta'''" in out


def test_kdv_system(capsys):
    code, out, _ = run(capsys, "kdv", "system")
    assert code == 0 and "sign" in out and "eliminated" in out


def test_genus(capsys):
    code, out, _ = run(capsys, "genus", "--gens", "D^-2,D^-3")
    assert code == 0
    assert "genus 1" in out and "gaps [1]" in out


def test_extract_non_commuting(capsys):
    code, out, err = run(capsys, "schur", "extract", "--gens", "D^2,D^3+x")
    assert code != 0 and out == ""
    assert json.loads(err)["error"] == "non-commuting"


def test_syntax_error_reports_position(capsys):
    code, _, err = run(capsys, "sigma", "D^x")
    data = json.loads(err)
    assert code == 2 and data["error"] == "syntax-error" and data["position"] == 2


def test_error_categories(capsys):
    cases = [
        (["invert", "x*D"], "non-unit-leading"),
        (["root", "--as", "series", "--n", "2", "y^-3"], "divisibility-violation"),
        (["conjugate", "2*D^2"], "not-monic"),
        (["revert", "y^2"], "bad-valuation"),
        (["sigma", "D + t"], "unknown-symbol"),
    ]
    for argv, category in cases:
        code, _, err = run(capsys, *argv)
        assert code == 2, argv
        assert json.loads(err)["error"] == category, argv


def test_basic_operator_commands(capsys):
    code, out, _ = run(capsys, "--depth", "3", "mul", "D", "x")
    assert code == 0 and out.startswith("(x)*D + 1")
    code, out, _ = run(capsys, "sigma", "D^-1")
    assert out.startswith("y + O(y^")
    code, out, _ = run(capsys, "commutator", "D", "x")
    assert out.startswith("1")
    code, out, _ = run(capsys, "act", "D", "y")
    assert out.startswith("1 + O(y^")
    code, out, _ = run(capsys, "conjugate", "D^2 + D + 1/4")
    assert "verified: true" in out


def test_series_commands(capsys):
    code, out, _ = run(capsys, "--depth", "6", "revert", "y + y^2")
    assert out.startswith("y - y^2 + 2*y^3 - 5*y^4")
    code, out, _ = run(capsys, "compose", "y^-1", "y + y^2")
    assert out.startswith("y^-1 - 1 + y")
    code, out, _ = run(capsys, "root", "--n", "2", "y^-4")
    assert out.startswith("y^-2")
    code, out, _ = run(capsys, "--as", "series", "invert", "1 + y")
    assert out.startswith("1 - y + y^2")


def test_schur_round_trip_via_json(capsys, tmp_path):
    path = tmp_path / "pair.json"
    code, _, _ = run(capsys, "--depth", "12", "--xprec", "12", "--json-out", str(path),
                     "schur", "extract", "--gens", "D^2,D^3+D")
    assert code == 0
    code, out, _ = run(capsys, "schur", "validate", "--pair", str(path))
    assert code == 0 and "valid: true" in out
    code, out, _ = run(capsys, "schur", "index", "--pair", str(path))
    assert "index 0" in out and "N = 0" in out
    code, out, _ = run(capsys, "--xprec", "12", "schur", "rebuild", "--pair", str(path))
    lines = out.splitlines()
    assert lines[0].startswith("D^2") and lines[1].startswith("D^3")


def test_cubic(capsys):
    code, out, _ = run(capsys, "cubic", "--delta", "1")
    assert code == 0 and "tag node" in out and "genus 1" in out
    code, out, _ = run(capsys, "cubic")
    assert "tag cusp" in out
    code, out, _ = run(capsys, "--ring", '{"kind": "poly", "vars": ["delta"]}', "cubic", "--delta", "delta")
    assert "tag parametric" in out


def test_elliptic(capsys):
    code, out, _ = run(capsys, "elliptic", "--A", "0", "--B", "1", "--point", "2,3")
    assert code == 0
    assert "FAIL" not in out and "none in window" in out


@pytest.mark.parametrize("argv", [
    ["--depth", "8", "schur", "extract", "--gens", "D^2,D^3+2*D"],
    ["--depth", "8", "mul", "D^2 + x", "D^-1"],
    ["kdv", "system"],
    ["elliptic", "--family-depth", "8"],
])
def test_json_is_byte_identical(argv, tmp_path, capsys):
    blobs = []
    for k in range(2):
        path = tmp_path / f"out{k}.json"
        assert main(argv + ["--json-out", str(path)]) == 0
        blobs.append(path.read_bytes())
    capsys.readouterr()
    assert blobs[0] == blobs[1]
    json.loads(blobs[0])


def test_console_entry_point():
    res = subprocess.run([sys.executable, "-m", "sato.cli", "kdv", "residual", "--beta", "x"],
                         capture_output=True, text=True)
    assert res.returncode == 0
    assert "-2/3" in res.stdout
