import json
import math
import subprocess
import sys

import pytest

from lieb_jastrow.cli import EXIT_COMPUTE, EXIT_OK, EXIT_USAGE, main, parse_grid, parse_number


def run(*args):
    proc = subprocess.run(
        [sys.executable, "-m", "lieb_jastrow", *args], capture_output=True, text=True, timeout=300
    )
    return proc.returncode, proc.stdout, proc.stderr


def test_parse_number():
    assert parse_number("pi/2") == pytest.approx(math.pi / 2)
    assert parse_number("inf") == math.inf
    assert parse_number("4*pi/5") == pytest.approx(4 * math.pi / 5)
    with pytest.raises(Exception):
        parse_number("__import__('os')")


def test_parse_grid():
    assert list(parse_grid("0:1:3")) == [0.0, 0.5, 1.0]
    assert list(parse_grid("1, 2,pi")) == [1.0, 2.0, pytest.approx(math.pi)]


def test_energy_scan_deterministic(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    args = ["energy-scan", "--k-prime", "pi/3", "--grid", "0.5:3:4"]
    assert main(args + ["--out", str(a)]) == EXIT_OK
    assert main(args + ["--out", str(b)]) == EXIT_OK
    assert a.read_bytes() == b.read_bytes()
    lines = a.read_text().splitlines()
    assert lines[0].startswith("# columns: k [")
    header = [l for l in lines if not l.startswith("#")][0]
    assert header.split(",")[:3] == ["k", "k_prime", "E_jastrow"]


def test_json_output(capsys):
    assert main(["optimal-v", "--grid", "1,2", "--format", "json"]) == EXIT_OK
    data = json.loads(capsys.readouterr().out)
    assert [c for c in data["columns"]][:3] == ["k", "k_prime", "v_opt"]
    assert len(data["rows"]) == 2
    assert all(row[2] < 1.0 for row in data["rows"])


def test_usage_errors():
    assert main(["energy-scan", "--k", "1", "--g", "2"]) == EXIT_USAGE
    assert main(["energy-scan", "--grid", "0.5:5:3"]) == EXIT_USAGE
    assert main(["correlations"]) == EXIT_USAGE
    assert main(["nonsense"]) == EXIT_USAGE


def test_compute_error_exit_code():
    assert main(["oracle", "--g", "1", "--g-prime", "1", "--n-max", "200,210,220"]) == EXIT_COMPUTE


def test_transition_curve_omits_out_of_domain(capsys):
    assert main(["correlations", "--frame", "transition-curve", "--grid", "2.5,3.1"]) == EXIT_OK
    rows = [l for l in capsys.readouterr().out.splitlines() if not l.startswith("#")]
    assert len(rows) == 2 and rows[1].startswith("2.5,")


def test_stability_and_oracle(capsys):
    assert main(["stability", "--grid", "0.5:2.5:3"]) == EXIT_OK
    out = capsys.readouterr().out
    assert "max_rel_gap_vary_k_vs_vary_k_prime" in out
    assert main(["oracle", "--g", "10", "--g-prime", "10", "--n-max", "8,12,16,24"]) == EXIT_OK
    rows = [l for l in capsys.readouterr().out.splitlines() if not l.startswith("#")]
    assert rows[-1].startswith("inf,")


def test_correlation_frames(capsys):
    for frame in ("pair-mm", "pair-im", "jacobi", "two-body", "three-body-contour"):
        assert main(["correlations", "--frame", frame, "--k", "2", "--k-prime", "1", "--n-grid", "11"]) == EXIT_OK
    assert "iso_level" in capsys.readouterr().out


def test_verify_quick_passes_and_fault_is_caught():
    code, out, err = run("verify", "--quick")
    assert code == 0, out + err
    code, out, _ = run("verify", "--quick", "--inject-fault", "norm-c2")
    assert code == 3
    failed = [l for l in out.splitlines() if l.endswith(",FAIL")]
    assert any("norm_c2 quadrature equivalence" in l for l in failed)


def test_formula_report(capsys):
    assert main(["verify", "--formula-report"]) == EXIT_OK
    out = capsys.readouterr().out
    assert "dev_printed" in out and "dev_implemented" in out
