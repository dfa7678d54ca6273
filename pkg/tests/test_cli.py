import csv
import io
import json
import math
import shutil
import subprocess

import pytest

from rankres.cli import main, parse_complex


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = main(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


@pytest.mark.parametrize("text,value", [
    ("1,2", 1 + 2j), ("1+2j", 1 + 2j), ("-1,0", -1 + 0j), ([3, -4], 3 - 4j), ("2.5", 2.5),
])
def test_parse_complex(text, value):
    assert parse_complex(text) == value


def test_poles_coupled():
    code, out, _ = run("poles", "--omega", "1", "--gamma-c", "0.1")
    assert code == 0
    poles = [r for r in rows(out) if r["kind"] == "pole"]
    assert len(poles) == 2
    for r in poles:
        assert float(r["im"]) < 0 and r["sheet"] == "2"
        assert abs(float(r["re"])) == pytest.approx(math.sqrt(0.99), abs=1e-15)
    first = [r for r in rows(out) if r["label"] == "first+"][0]
    assert float(first["re"]) == pytest.approx(math.sqrt(0.98))


def test_poles_friedrichs_factored():
    code, out, _ = run("poles", "--model", "friedrichs", "--omega", "2", "--c", "2",
                       "--gamma1", "0", "--gamma2c", "1")
    assert code == 0
    re = sorted(float(r["re"]) for r in rows(out))
    assert re == pytest.approx([-1, 0, 1], abs=1e-12)


def test_poles_json():
    code, out, _ = run("poles", "--omega", "1", "--gamma-c", "1", "--output", "json")
    data = json.loads(out)
    assert code == 0 and data["columns"][0] == "kind"
    first = [r for r in data["rows"] if r["label"] == "first+"][0]
    assert first["exists"] is False


def test_spectrum_contains_complete_reflection():
    code, out, _ = run("spectrum", "--omega", "1", "--gamma-c", "0.1", "--grid", "0:2:21")
    assert code == 0
    data = rows(out)
    assert len(data) == 21
    at_one = [r for r in data if float(r["k"]) == 1.0][0]
    assert float(at_one["amp_Q"]) == 0.0
    assert float(at_one["phase"]) == pytest.approx(-math.pi / 2)


def test_spectrum_two_rows_and_bit_stability():
    args = ("spectrum", "--omega", "1.3", "--gamma-c", "0.27", "--grid", "0.1:3.7:2")
    code, out, _ = run(*args)
    assert code == 0 and len(rows(out)) == 2
    assert run(*args)[1] == out
    assert "\r" not in out and "-0," not in out


def test_spectrum_at_pole_sentinel():
    code, out, _ = run("spectrum", "--omega", "1", "--gamma-c", "0", "--grid", "0:2:3")
    assert code == 0
    assert [r["status"] for r in rows(out)] == ["ok", "at_pole", "ok"]


def test_spectrum_argmax():
    p = ("--omega", "1", "--gamma-c", "0.1")
    code, out, _ = run("spectrum", *p, "--grid", "0.9:1.1:20001")
    data = rows(out)
    best = max(data, key=lambda r: float(r["amp_q"]))
    assert float(best["k"]) == pytest.approx(math.sqrt(0.98), abs=1e-5)


def test_resolve_uncoupled():
    code, out, _ = run("resolve", "--omega", "2", "--gamma-c", "0", "--z", "1", "--w1", "1")
    assert code == 0
    assert json.loads(out)["q"] == pytest.approx([0.2, 0.0])


def test_resolve_cross_path(tmp_path):
    field = tmp_path / "w2.json"
    field.write_text(json.dumps({"terms": [
        {"kind": "gaussian", "amp": [1, 0.5], "center": 0.3, "width": 0.5},
        {"kind": "point", "amp": [0, 1], "at": -0.2}]}))
    common = ("resolve", "--omega", "1.5", "--gamma-c", "0.4", "--z", "1,0.5", "--w1", "0.3",
              "--field", str(field), "--x=-1,0,0.7")
    a = json.loads(run(*common, "--path", "block")[1])
    b = json.loads(run(*common, "--path", "rank1")[1])
    for key in ("q", "c1", "c2"):
        assert complex(*a[key]) == pytest.approx(complex(*b[key]), rel=1e-10)
    for ua, ub in zip(a["u"], b["u"]):
        assert complex(*ua["value"]) == pytest.approx(complex(*ub["value"]), rel=1e-10)


def test_resolve_friedrichs_keys():
    code, out, _ = run("resolve", "--model", "friedrichs", "--omega", "1", "--gamma1", "0.5",
                       "--gamma2c", "0.5", "--z", "1,1", "--w1", "1", "--x", "0")
    data = json.loads(out)
    assert code == 0 and "q0" in data and "phi" in data


def test_config_file(tmp_path):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"model": "coupled", "params": {"omega": 1, "gamma_c": 0.1},
                               "output": "json"}))
    code, out, _ = run("poles", "--config", str(cfg))
    assert code == 0 and json.loads(out)["rows"]


@pytest.mark.parametrize("argv,code", [
    (("resolve", "--omega", "1", "--gamma-c", "0.1", "--z=-1,0"), 3),
    (("sheet", "--omega", "1", "--gamma-c", "0.1", "--z=-0.98,0.198997487421324",
      "--sheet", "2"), 5),
    (("poles", "--omega", "-1", "--gamma-c", "0.1"), 2),
    (("poles", "--gamma-c", "0.1"), 2),
    (("spectrum", "--omega", "1", "--gamma-c", "0.1", "--grid", "bad"), 2),
    (("spectrum", "--model", "friedrichs", "--omega", "1", "--gamma1", "1", "--gamma2c", "1",
      "--grid", "0:1:2"), 2),
    (("resolve", "--omega", "1", "--gamma-c", "0.1", "--z", "1", "--field", "/nonexistent"), 2),
])
def test_exit_codes(argv, code):
    got, _, err = run(*argv)
    assert got == code
    assert err.startswith("rankres:")


def test_pole_diagnostic_has_coordinates():
    _, _, err = run("sheet", "--omega", "1", "--gamma-c", "0.1",
                    "--z=-0.98,0.198997487421324", "--sheet", "2")
    assert "k =" in err and "z =" in err


def test_malformed_config(tmp_path):
    cfg = tmp_path / "bad.json"
    cfg.write_text("{not json")
    code, _, err = run("poles", "--config", str(cfg))
    assert code == 2 and "config" in err


def test_sheet_values():
    code, out, _ = run("sheet", "--omega", "1", "--gamma-c", "0", "--z", "1", "--sheet", "1")
    assert code == 0 and json.loads(out)["value"] == pytest.approx([0.5, 0.0])


def test_selfcheck_negative_control():
    code, out, _ = run("selfcheck", "--corrupt-tolerance")
    assert code == 1 and "FAIL" in out


@pytest.mark.skipif(shutil.which("rankres") is None, reason="console script not installed")
def test_console_script():
    proc = subprocess.run(["rankres", "poles", "--omega", "1", "--gamma-c", "0.1"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0 and proc.stdout.startswith("kind,label")
