"""Command-line surface: formats, exit codes, determinism."""

from __future__ import annotations

import csv
import io
import json
from fractions import Fraction

from mahlerx.cli import CSV_HEADER, WITNESS_SEP, main
from mahlerx.radq import parse_vector


def run_cli(capsys, *argv: str) -> tuple[int, str, str]:
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_measure_poly_lehmer(capsys):
    code, out, _ = run_cli(
        capsys, "measure-poly", "x^10+x^9-x^7-x^6-x^5-x^4-x^3+x+1", "--tol", "1e-9")
    assert code == 0
    assert "0.16235761" in out and "width <=" in out
    code, out, _ = run_cli(
        capsys, "measure-poly", "x^10+x^9-x^7-x^6-x^5-x^4-x^3+x+1",
        "--tol", "1e-9", "--format", "json")
    record = json.loads(out)
    assert record["value_lo"] <= 0.16235761200773814 <= record["value_hi"]
    assert record["value_hi"] - record["value_lo"] <= 1e-9


def test_measure_poly_exact_zero(capsys):
    code, out, _ = run_cli(capsys, "measure-poly", "x^2-x+1")
    assert code == 0
    assert "0 (exact)" in out


def test_mx_json_matches_documented_example(capsys):
    code, out, _ = run_cli(
        capsys, "mx", "4", "--x", "2", "--denom-bound", "2", "--format", "json")
    assert code == 0
    record = json.loads(out)
    assert record["witness"] == ["2^1", "2^1"]
    assert record["certificate"] == "certified"
    assert record["value_lo"] <= 0.9802581434685472 <= record["value_hi"]
    # witness strings re-parse and multiply back to the input
    total = parse_vector("1")
    for term in record["witness"]:
        total = total + parse_vector(term)
    assert total == parse_vector(record["input"])


def test_mx_identity(capsys):
    code, out, _ = run_cli(capsys, "mx", "1", "--x", "1", "--format", "json")
    assert code == 0
    record = json.loads(out)
    assert record["witness"] == [] and record["value_hi"] == 0.0


def test_mx_rejects_bad_inputs(capsys):
    code, _, err = run_cli(capsys, "mx", "0", "--x", "1")
    assert code == 2 and "input error" in err
    code, _, err = run_cli(capsys, "mx", "4", "--x", "0")
    assert code == 2
    code, _, err = run_cli(capsys, "mx", "2^(1/2)", "--x", "1")
    assert code == 2  # lattice excludes the target at the default denominator bound


def test_precision_exhaustion_exit_code(capsys):
    code, _, err = run_cli(
        capsys, "mx", "4", "--x", "1", "--precision-bits", "16", "--max-bits", "16",
        "--tie-eps", "1/340282366920938463463374607431768211456")
    assert code == 3 and "precision" in err.lower()
    code, _, err = run_cli(capsys, "measure-poly", "x-2", "--tol", "1e-300",
                           "--max-bits", "256")
    assert code == 3


def test_curve_csv_round_trips(capsys):
    code, out, _ = run_cli(
        capsys, "curve", "12", "--grid", "1/2:2:1/2", "--format", "csv")
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == CSV_HEADER
    rows = list(csv.DictReader(io.StringIO(out)))
    assert len(rows) == 4
    target = parse_vector("12")
    previous_lo = None
    for row in rows:
        lo, hi = float(row["value_lo"]), float(row["value_hi"])
        assert lo <= hi
        total = parse_vector("1")
        for term in row["witness"].split(WITNESS_SEP):
            total = total + parse_vector(term)
        assert total == target
        assert row["certificate"] == "certified"
        if previous_lo is not None:
            assert lo <= previous_lo + 1e-12  # non-increasing curve
        previous_lo = lo
        Fraction(row["x"])  # x column parses as an exact rational


def test_threshold_reports_infinite_case(capsys):
    code, out, _ = run_cli(capsys, "threshold", "2", "--format", "json")
    assert code == 0
    record = json.loads(out)
    assert record["exact_form"] == "inf"
    code, out, _ = run_cli(capsys, "threshold", "4", "--format", "json")
    record = json.loads(out)
    assert record["value_lo"] <= 1.0 <= record["value_hi"]


def test_mbar_reports_exact_form(capsys):
    code, out, _ = run_cli(capsys, "mbar", "2^(3/2)", "--format", "json")
    assert code == 0
    record = json.loads(out)
    assert record["exact_form"] == "3*log(2)"
    assert record["min_degree"] == 2
    assert record["weil_height"] == "(3/2)*log(2)"


def test_weil_hx_closed_form_and_upper(capsys):
    code, out, _ = run_cli(capsys, "weil-hx", "2", "--x", "2",
                           "--bound-n", "4", "--format", "json")
    assert code == 0
    payload = json.loads(out)
    records = payload["points"]
    assert records[0]["value_hi"] == 0.0
    upper = records[1]
    assert upper["value_lo"] <= 0.34657359027997264 <= upper["value_hi"]

    code, out, _ = run_cli(capsys, "weil-hx", "8", "--x", "1", "--format", "json")
    record = json.loads(out)
    assert record["exact_form"] == "3*log(2)"


def test_verify_unknown_suite_exits_two(capsys):
    assert main(["verify", "nonsense"]) == 2


def test_verify_weil_deterministic_and_green(capsys):
    code1, out1, _ = run_cli(capsys, "verify", "weil", "--seed", "42")
    code2, out2, _ = run_cli(capsys, "verify", "weil", "--seed", "42")
    assert code1 == code2 == 0

    def strip_timing(text: str) -> str:
        return "\n".join(l for l in text.splitlines() if not l.startswith("elapsed_ms="))

    assert strip_timing(out1) == strip_timing(out2)
    assert "[PASS]" in out1 and "[FAIL]" not in out1


def test_env_var_sets_default_precision(capsys, monkeypatch):
    monkeypatch.setenv("MAHLER_PRECISION_BITS", "192")
    code, out, _ = run_cli(capsys, "mbar", "12", "--format", "json")
    assert code == 0
    assert json.loads(out)["precision_bits"] == 192
    monkeypatch.delenv("MAHLER_PRECISION_BITS")
    code, out, _ = run_cli(capsys, "mbar", "12", "--format", "json")
    assert json.loads(out)["precision_bits"] == 128


def test_threads_flag_validated(capsys):
    code, _, err = run_cli(capsys, "mx", "4", "--x", "1", "--threads", "0")
    assert code == 2
    code, _, _ = run_cli(capsys, "mx", "4", "--x", "1", "--threads", "8")
    assert code == 0


def test_bad_polynomial_is_input_error(capsys):
    code, _, err = run_cli(capsys, "measure-poly", "x^^2")
    assert code == 2 and "input error" in err
