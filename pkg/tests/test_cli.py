from __future__ import annotations

import json
import subprocess
import sys

import pytest

from tdlab.cli import main

SMALL_GRID = {"grid": {"a_values": ["2", "3"], "max_diameter": 2, "max_factors": 2, "leading_ells": [0, 1],
                       "extras": [], "t_values": ["5", "7"]}}


def write(tmp_path, name, data):
    p = tmp_path / name
    p.write_text(data if isinstance(data, str) else json.dumps(data))
    return str(p)


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_analyze_single_string(tmp_path, capsys):
    spec = write(tmp_path, "m.json", {"kind": [0, 0], "factors": [{"ell": 1, "a": "3"}]})
    code, out, _ = run(capsys, "analyze", "--spec", spec, "--s", "2")
    assert code == 0
    rep = json.loads(out)
    res = rep["results"]
    assert res["drinfeld"] == ["3", "1"]
    assert res["drinfeld_matches_closed_form"] and res["criteria_agree"]
    assert res["classification"]["m_sdt_member"] is None
    assert rep["passed"] and "timing_seconds" not in rep


def test_analyze_with_t_reports_td_pair(tmp_path, capsys):
    spec = write(tmp_path, "m.json", {"kind": [1, 1], "factors": [{"ell": 2, "a": "3"}]})
    code, out, _ = run(capsys, "analyze", "--spec", spec, "--s", "3", "--t", "5", "--timing")
    assert code == 0
    rep = json.loads(out)
    res = rep["results"]
    assert res["td_pair"]["is_td_pair"] and res["a_relations"]["passed"]
    assert len(res["st_equivalents"]) == 8
    assert res["classification"]["m_sdt_member"] is True
    assert "timing_seconds" in rep


def test_theta_failure_flags_membership(tmp_path, capsys):
    spec = write(tmp_path, "m.json", {"kind": [1, 1], "factors": [{"ell": 1, "a": "3"}, {"ell": 1, "a": "5"}]})
    code, out, _ = run(capsys, "qstrings", "classify", spec, "--s", "1", "--t", "2")
    assert code == 0
    cls = json.loads(out)["results"]["classification"]
    assert cls["m_sdt_member"] is False and "theta_distinct" in cls["failed_conditions"]


def test_malformed_json_exit_2(tmp_path, capsys):
    bad = write(tmp_path, "bad.json", "{not json")
    code, out, err = run(capsys, "analyze", "--spec", bad, "--s", "2")
    assert code == 2 and out == "" and "ParseError" in err


def test_missing_s_is_usage_error(tmp_path, capsys):
    spec = write(tmp_path, "m.json", {"kind": [1, 1], "factors": [{"ell": 1, "a": "3"}]})
    code, out, _ = run(capsys, "analyze", "--spec", spec)
    assert code == 2 and out == ""


def test_decompose(tmp_path, capsys):
    om = write(tmp_path, "o.json", ["2", "1/2"])
    code, out, _ = run(capsys, "qstrings", "decompose", om)
    assert code == 0
    assert json.loads(out)["results"]["strings"] == [{"ell": 2, "a": "1"}]


def test_decompose_symmetric_rejects_asymmetric(tmp_path, capsys):
    om = write(tmp_path, "o.json", ["2", "3", "1/3"])
    code, out, err = run(capsys, "qstrings", "decompose-symmetric", om)
    assert code == 5 and out == "" and "MultisetError" in err


def test_radical_outside_field(tmp_path, capsys):
    spec = write(tmp_path, "m.json", {"kind": [1, 1], "factors": [{"ell": 1, "a": "sqrt(5)"}]})
    code, _, err = run(capsys, "verify", "--spec", spec)
    assert code == 5 and "FieldMismatchError" in err
    cfg = write(tmp_path, "c.json", {"D": 5})
    code, out, _ = run(capsys, "verify", "--spec", spec, "--config", cfg, "--s", "2")
    assert code == 0 and json.loads(out)["results"]["t_relations"]["passed"]


def test_verify_command(tmp_path, capsys):
    spec = write(tmp_path, "m.json", {"kind": [1, 0], "factors": [{"ell": 1, "a": "3"}], "leading_trivial_ell": 1})
    code, out, _ = run(capsys, "verify", "--spec", spec, "--s", "3", "--t", "5")
    res = json.loads(out)["results"]
    assert code == 0 and res["loop_relations"]["passed"] and res["a_relations"]["passed"]


def test_grid_cap_exit_4(tmp_path, capsys):
    cfg = write(tmp_path, "c.json", {"grid": {**SMALL_GRID["grid"], "cap": 4, "max_diameter": 6}})
    code, out, err = run(capsys, "grid", "--config", cfg)
    assert code == 4 and out == "" and "CapExceededError" in err


def test_unknown_config_key(tmp_path, capsys):
    cfg = write(tmp_path, "c.json", {"grid": {"bogus": 1}})
    code, _, _ = run(capsys, "grid", "--config", cfg)
    assert code == 2


def test_small_grid_is_deterministic(tmp_path, capsys):
    cfg = write(tmp_path, "c.json", SMALL_GRID)
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert main(["grid", "--config", cfg, "--kind", "1,0", "--out", str(a)]) == 0
    assert main(["grid", "--config", cfg, "--kind", "1,0", "--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    rep = json.loads(a.read_text())
    assert rep["passed"] and rep["results"]["summary"]["failed_instances"] == 0
    assert "check_seconds" not in rep["results"]


def test_seed_env_override(tmp_path, monkeypatch, capsys):
    spec = write(tmp_path, "m.json", {"kind": [1, 1], "factors": [{"ell": 1, "a": "3"}]})
    monkeypatch.setenv("TDLAB_SEED", "11")
    code, out, _ = run(capsys, "analyze", "--spec", spec, "--s", "2", "--seed", "4")
    assert code == 0 and json.loads(out)["command"]["seed"] == 11
    monkeypatch.setenv("TDLAB_SEED", "x")
    code, _, _ = run(capsys, "analyze", "--spec", spec, "--s", "2")
    assert code == 2


def test_module_entry_point(tmp_path):
    om = write(tmp_path, "o.json", ["4", "1/4"])
    proc = subprocess.run([sys.executable, "-m", "tdlab", "qstrings", "decompose-symmetric", om],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["results"]["strings"] == [{"ell": 1, "a": "4"}]


@pytest.mark.parametrize("argv", [["--version"]])
def test_version(argv, capsys):
    with pytest.raises(SystemExit) as exc:
        main(argv)
    assert exc.value.code == 0
