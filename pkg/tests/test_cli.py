import csv
import io
import json

import pytest

from latticedec.cli import main, parse_complex
from latticedec.cochain import load_cochain, make_cochain, random_cochain, save_cochain


def run(*argv):
    out = io.StringIO()
    code = main(list(argv), out=out)
    return code, out.getvalue()


def test_parse_complex():
    assert parse_complex("-4,0") == -4
    assert parse_complex("-2,3") == -2 + 3j
    assert parse_complex("12") == 12


def test_verify_calculus_passes():
    code, text = run("verify", "--suite", "calculus", "--n", "8", "--seed", "1")
    payload = json.loads(text)
    assert code == 0 and payload["passed"]
    assert all(c["passed"] for c in payload["checks"])


def test_verify_csv_format():
    code, text = run("verify", "--suite", "calculus", "--n", "4", "--format", "csv")
    rows = list(csv.reader(io.StringIO(text)))
    assert code == 0 and rows[0] == ["property", "residual", "tolerance", "passed", "detail"]
    assert all(r[3] == "1" for r in rows[1:])


def test_green_formula_value():
    code, text = run("green", "0", "0", "0", "0", "--lambda", "-4,0", "--source", "formula")
    assert code == 0
    assert abs(float(text) - 0.14433756729740643) <= 1e-16


def test_green_oracles_agree():
    _, solve = run("green", "3", "2", "0", "0", "--lambda", "-4,0", "--source", "solve")
    _, fourier = run("green", "3", "2", "0", "0", "--lambda", "-4,0", "--source", "fourier")
    assert abs(parse_complex(solve.strip()) - parse_complex(fourier.strip())) <= 1e-8


def test_green_complex_output():
    code, text = run("green", "1", "0", "0", "0", "--lambda", "-2,3")
    assert code == 0 and "," in text


def test_lambda_on_spectrum_exits_2(capsys):
    code, text = run("green", "0", "0", "0", "0", "--lambda", "0,0")
    assert code == 2 and text == ""
    assert "spectrum" in capsys.readouterr().err


def test_bad_lambda_exits_2():
    assert run("green", "0", "0", "0", "0", "--lambda", "abc")[0] == 2


def test_resolvent_with_check(tmp_path, rng):
    src, dst = tmp_path / "phi.json", tmp_path / "out.json"
    save_cochain(random_cochain(0, 2, rng), src)
    code, text = run("resolvent", str(src), "--lambda", "-4,0", "--out", str(dst), "--check")
    summary = json.loads(text)
    assert code == 0 and summary["passed"]
    assert summary["recovery_residual_on_support"] <= 1e-7
    assert load_cochain(dst).degree == 0


def test_resolvent_of_zero_form(tmp_path):
    src, dst = tmp_path / "zero.json", tmp_path / "out.json"
    save_cochain(make_cochain(0, 1, 0), src)
    code, _ = run("resolvent", str(src), "--lambda", "-4", "--out", str(dst))
    assert code == 0 and load_cochain(dst).is_zero()


def test_resolvent_rejects_malformed_and_wrong_degree(tmp_path, rng):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert run("resolvent", str(bad), "--lambda", "-4", "--out", str(tmp_path / "o.json"))[0] == 2
    one = tmp_path / "one.json"
    save_cochain(random_cochain(1, 1, rng), one)
    assert run("resolvent", str(one), "--lambda", "-4", "--out", str(tmp_path / "o.json"))[0] == 2


def test_report_files_are_deterministic(tmp_path):
    paths = []
    for name in ("a", "b"):
        out = tmp_path / f"{name}.json"
        code, _ = run("report", "--lambda", "-4,0", "--w", "4", "--out", str(out))
        assert code == 0
        paths.append(out)
    assert paths[0].read_bytes() == paths[1].read_bytes()
    assert paths[0].with_suffix(".csv").read_bytes() == paths[1].with_suffix(".csv").read_bytes()
    assert len(paths[0].with_suffix(".csv").read_text().splitlines()) == 82


def test_report_to_stdout():
    code, text = run("report", "--lambda", "-1", "--w", "2")
    assert code == 0 and json.loads(text)["w"] == 2


def test_spectrum_table():
    code, text = run("spectrum", "--n", "2,4")
    rows = list(csv.DictReader(io.StringIO(text)))
    assert code == 0 and [r["n"] for r in rows] == ["2", "4"]
    assert float(rows[0]["estimate"]) == pytest.approx(4 + 2 * 3**0.5, abs=1e-6)


def test_spectrum_json_and_bad_n():
    code, text = run("spectrum", "--n", "3", "--degree", "2", "--format", "json")
    assert code == 0 and json.loads(text)["rows"][0]["n"] == 3
    assert run("spectrum", "--n", "0")[0] == 2


def test_missing_subcommand_exits_2():
    assert run()[0] == 2
