import json

import numpy as np
import pytest

from cwillmore.cli import main, parse_list, parse_range

PI2 = np.pi**2


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_threshold_csv(capsys):
    code, out, _ = run(capsys, "threshold", "--b", "1.0")
    assert code == 0
    lines = out.splitlines()
    assert lines[0].startswith("# cwillmore ")
    assert any(line.startswith("# command: threshold") for line in lines)
    alpha = [line for line in lines if line.startswith("# alpha_b = ")][0]
    assert float(alpha.split("=")[1]) == pytest.approx(10 * PI2, abs=1e-9)
    assert "k,l,pattern,Q_alpha_value,margin" in lines


def test_threshold_json(capsys):
    code, out, _ = run(capsys, "threshold", "--b", "1.0", "--format", "json")
    doc = json.loads(out)
    assert code == 0 and doc["header"]["command"] == "threshold"
    assert doc["alpha_b"] == pytest.approx(10 * PI2, abs=1e-9)
    assert doc["table"][0].keys() >= {"k", "l", "pattern", "margin"}


def test_deterministic_output(capsys):
    a = run(capsys, "energy", "--b", "1.2", "--surface", "equivariant12")[1]
    b = run(capsys, "energy", "--b", "1.2", "--surface", "equivariant12")[1]
    assert a == b and "20.0681956" in a


def test_output_file(tmp_path, capsys):
    path = tmp_path / "e.json"
    code, out, _ = run(capsys, "energy", "--b", "1.0", "--format", "json", "--output", str(path))
    assert code == 0 and out == ""
    doc = json.loads(path.read_text())
    assert doc["W"] == pytest.approx(2 * PI2, abs=1e-8)
    assert "output" not in doc["header"]["config"]


@pytest.mark.parametrize(
    "argv",
    [
        ["threshold", "--b", "-1"],
        ["threshold", "--b", "2.0"],
        ["threshold", "--b", "1.0", "--kmax", "3"],
        ["threshold"],
        ["threshold", "--b", "1.0", "--bogus"],
        ["omega-table", "--b", "1.0", "--a-grid", "0:0.02:5"],
        ["omega-table", "--b", "1.0", "--a-grid", "nonsense"],
        ["minimize", "--b", "1.0", "--kind", "penalized"],
        ["energy", "--b", "1.0", "--n", "15"],
        ["energy", "--b", "1.0", "--threads", "0"],
        ["nosuchcommand"],
    ],
)
def test_usage_errors_exit_2(capsys, argv):
    assert run(capsys, *argv)[0] == 2


def test_config_file(tmp_path, capsys):
    good = tmp_path / "good.json"
    good.write_text(json.dumps({"n": 64}))
    code, out, _ = run(capsys, "energy", "--b", "1.0", "--config", str(good))
    assert code == 0 and '"n": 64' in out
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"colour": "red"}))
    code, _, err = run(capsys, "energy", "--b", "1.0", "--config", str(bad))
    assert code == 2 and "colour" in err


def test_spectrum(capsys):
    code, out, _ = run(capsys, "spectrum", "--b", "1.0", "--alpha", str(10 * PI2), "--kmax", "3",
                       "--method", "analytic", "--format", "json")
    doc = json.loads(out)
    assert code == 0
    margins = {(r["k"], r["l"], r["pattern"]): r["margin"] for r in doc["table"]}
    assert abs(margins[(1, 2, "+")]) < 1e-9 and min(margins.values()) > -1e-9


def test_parse_helpers():
    assert parse_range("0:0.01:3") == [0.0, 0.01, 0.02]
    assert parse_range("0.005:0.005:2") == [0.005, 0.01]
    assert parse_list("1,3,11") == [1, 3, 11]
    import argparse

    for bad in ("1:2", "0:-1:3", "0:1:0", "a:b:c"):
        with pytest.raises(argparse.ArgumentTypeError):
            parse_range(bad)
    with pytest.raises(argparse.ArgumentTypeError):
        parse_list("1,x")


def test_verify_subset(tmp_path, capsys):
    path = tmp_path / "v.json"
    code, _, err = run(capsys, "verify", "--only", "2,5", "--output", str(path))
    doc = json.loads(path.read_text())
    assert code == 0 and doc["passed"]
    assert [c["number"] for c in doc["criteria"]] == [2, 5]
    assert "[PASS] criterion  2" in err
