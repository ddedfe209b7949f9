import json
import math
import subprocess
import sys

import numpy as np
import pytest

from floqlat import cli


def read(path):
    with open(path, "rb") as fh:
        return fh.read()


@pytest.mark.parametrize("token,value", [
    ("1.5pi", 1.5 * math.pi), ("pi", math.pi), ("0.5*pi", 0.5 * math.pi),
    ("-pi", -math.pi), ("2.25", 2.25), (".5 pi", 0.5 * math.pi),
])
def test_parse_real(token, value):
    assert cli.parse_real(token) == pytest.approx(value, abs=0)


def test_parse_real_rejects_garbage():
    with pytest.raises(Exception):
        cli.parse_real("1.5pie")


def test_pbc_spectrum_csv(tmp_path):
    out = tmp_path / "f.csv"
    assert cli.main(["pbc-spectrum", "--model", "floquet", "--jt", "1.5pi", "--grid", "64",
                     "--format", "csv", "-o", str(out)]) == 0
    raw = read(out)
    assert b"\r" not in raw
    lines = raw.decode().splitlines()
    assert lines[0] == "k_plus,k_minus,band,value"
    assert len(lines) == 1 + 64 * 64 * 2
    # 12 significant digits, no negative zero
    cells = lines[1].split(",")
    assert cells[0] == format(float(cells[0]), ".12g") and cells[0] == "-3.04341788317"
    assert not any(",-0," in l or l.endswith(",-0") for l in lines)


@pytest.mark.parametrize("model", ["static", "shifted"])
def test_pbc_spectrum_static_and_shifted_agree(tmp_path, model):
    out = tmp_path / f"{model}.csv"
    assert cli.main(["pbc-spectrum", "--model", model, "--grid", "8", "-o", str(out)]) == 0
    vals = np.loadtxt(out, delimiter=",", skiprows=1)
    assert vals.shape == (8 * 8 * (4 if model == "static" else 2), 4)


def test_compare_json(tmp_path):
    out = tmp_path / "r.json"
    assert cli.main(["compare", "--jt", "1.5pi", "--open", "x-minus", "--sites", "6",
                     "--format", "json", "-o", str(out)]) == 0
    doc = json.loads(read(out))
    assert doc["schema"] == 1
    assert doc["meta"]["jt"] == 4.71238898038469 and doc["meta"]["T"] == 1.0
    assert doc["meta"]["units"] == "1/T" and "version" in doc["meta"]
    assert doc["data"]["pbc"]["verdict"] == "pass"
    assert math.isfinite(doc["data"]["strip"]["max_abs_dev"])
    assert doc["data"]["strip"]["edge_census"]["floquet"] == {"left": 1, "right": 1}


def test_json_byte_stable(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    args = ["strip-spectrum", "--jt", "1.2pi", "--sites", "4", "--nk", "8", "--format", "json"]
    assert cli.main(args + ["-o", str(a)]) == 0
    assert cli.main(args + ["-o", str(b)]) == 0
    assert read(a) == read(b)


def test_phase_scan_gap_minimum_at_transition(tmp_path):
    out = tmp_path / "scan.csv"
    assert cli.main(["phase-scan", "--jt-min", "0.1pi", "--jt-max", "1.9pi", "--steps", "37",
                     "-o", str(out)]) == 0
    lines = read(out).decode().splitlines()
    header = lines[0].split(",")
    rows = [l.split(",") for l in lines[1:]]
    assert len(rows) == 37
    jt = np.array([float(r[header.index("jt")]) for r in rows])
    gap = np.array([float(r[header.index("gap")]) for r in rows])
    assert jt[np.argmin(gap)] == pytest.approx(math.pi)
    mid = rows[int(np.argmin(gap))]
    assert mid[header.index("gapless")] == "true" and mid[header.index("floquet_edges")] == ""


def test_edge_wavefunction_and_nogo(tmp_path):
    out = tmp_path / "wf.csv"
    assert cli.main(["edge-wavefunction", "--sites", "7", "-o", str(out)]) == 0
    lines = read(out).decode().splitlines()
    assert lines[0] == "model,cell,density" and len(lines) == 1 + 3 * 7
    out = tmp_path / "nogo.json"
    assert cli.main(["nogo-check", "--format", "json", "-o", str(out)]) == 0
    doc = json.loads(read(out))
    assert len(doc["data"]["m"]) == 2001 and not doc["data"]["any_compatible"]


def test_empty_table_header_only():
    assert cli.to_csv(["a", "b"], []) == "a,b\n"


def test_format_value():
    assert cli.format_value(-0.0) == "0"
    assert cli.format_value(np.float64(1 / 3)) == "0.333333333333"
    assert cli.format_value(True) == "true" and cli.format_value(None) == ""
    assert cli.format_value(np.int64(3)) == "3"


@pytest.mark.parametrize("argv,flag", [
    (["pbc-spectrum", "--jt", "2pi"], "--jt"),
    (["pbc-spectrum", "--jt", "0"], "--jt"),
    (["pbc-spectrum", "--grid", "1"], "--grid"),
    (["strip-spectrum", "--sites", "1"], "--sites"),
    (["pbc-spectrum", "--T", "-1"], "--T"),
    (["phase-scan", "--jt-max", "3pi"], "--jt-max"),
    (["nogo-check", "--m-min", "-2"], "--m-min"),
    (["pbc-spectrum", "--jt", "abc"], "--jt"),
])
def test_validation_exit_2(argv, flag, capsys):
    assert cli.main(argv) == 2
    assert flag in capsys.readouterr().err


def test_unknown_flag_prints_usage(capsys):
    assert cli.main(["pbc-spectrum", "--bogus"]) == 2
    assert "usage" in capsys.readouterr().err


def test_unwritable_path_exit_1(tmp_path):
    assert cli.main(["nogo-check", "-o", str(tmp_path / "missing" / "x.csv")]) == 1


def test_output_dir_env(tmp_path, monkeypatch):
    monkeypatch.setenv(cli.OUTPUT_DIR_ENV, str(tmp_path))
    assert cli.main(["nogo-check", "--step", "0.5", "-o", "n.csv"]) == 0
    assert read(tmp_path / "n.csv").decode().splitlines()[0] == "m,compatible,required_abs_m"


def test_stdout_default(capsys):
    assert cli.main(["nogo-check", "--step", "1"]) == 0
    assert capsys.readouterr().out == "m,compatible,required_abs_m\n-1,false,3\n0,false,3\n1,false,3\n"


def test_module_entry_point(tmp_path):
    out = subprocess.run([sys.executable, "-m", "floqlat", "nogo-check", "--step", "1"],
                         capture_output=True, text=True, check=True)
    assert out.stdout.startswith("m,compatible")
