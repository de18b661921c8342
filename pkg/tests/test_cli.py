"""Command-line interface: exit codes, output formats, reproducibility."""

import json

import pytest

from fourier_mpc.cli import main


def run_cli(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, out


def test_paper_example_passes(capsys):
    code, out = run_cli(capsys, "paper-example", "--json")
    assert code == 0
    doc = json.loads(out)
    assert doc["verdict"] == "PASS"
    assert doc["display_re"] == pytest.approx(-54.08, abs=1e-6)


def test_run_two_party_random_scenario(capsys):
    code, out = run_cli(capsys, "run-two-party", "--seed", "5")
    assert code == 0
    assert "verdict=PASS" in out


def test_run_n_party_and_multi_node_agree(capsys):
    code, out = run_cli(capsys, "run-n-party", "--n", "3", "--seed", "8",
                        "--json")
    assert code == 0
    d1 = json.loads(out)
    code, out = run_cli(capsys, "run-multi-node", "--n", "3", "--iota", "1",
                        "--seed", "8", "--json")
    assert code == 0
    d2 = json.loads(out)
    assert d1["display_re"] == pytest.approx(d2["display_re"], abs=1e-8)


def test_run_baseline(capsys):
    code, out = run_cli(capsys, "run-baseline", "--seed", "1", "--json")
    assert code == 0
    assert json.loads(out)["verdict"] == "PASS"


def test_verify_identity(capsys):
    for n in ("2", "4", "6"):
        code, out = run_cli(capsys, "verify-identity", "--n", n,
                            "--trials", "5", "--json")
        assert code == 0
        doc = json.loads(out)
        assert doc["verdict"] == "PASS"
        assert doc["worst_relative_gap"] < 1e-9


def test_diagnose_residual(capsys):
    code, out = run_cli(capsys, "diagnose-residual", "--n", "5", "--json")
    assert code == 0
    doc = json.loads(out)
    assert doc["path_gap"] < 1e-10


def test_approx_with_certified_bound(capsys):
    code, out = run_cli(capsys, "approx", "--func", "bilinear",
                        "--degree", "1", "--max-deriv", "0", "--json")
    assert code == 0
    doc = json.loads(out)
    assert doc["max_grid_error"] < 1e-12


def test_out_flag_writes_report_file(tmp_path, capsys):
    target = tmp_path / "report.json"
    code, _ = run_cli(capsys, "paper-example", "--json", "--out", str(target))
    assert code == 0
    doc = json.loads(target.read_text())
    assert doc["verdict"] == "PASS"


def test_seeded_reports_are_reproducible(capsys):
    _, out1 = run_cli(capsys, "run-n-party", "--n", "3", "--seed", "12",
                      "--json")
    _, out2 = run_cli(capsys, "run-n-party", "--n", "3", "--seed", "12",
                      "--json")
    d1, d2 = json.loads(out1), json.loads(out2)
    d1.pop("elapsed_ms"), d2.pop("elapsed_ms")
    assert d1 == d2


def test_scenario_file_round_trip(tmp_path, capsys):
    p = tmp_path / "sc.toml"
    p.write_text(
        'kind = "n-party"\ntau = "1/6"\nsecrets = [1.0, 2.0, 3.0]\n'
        "weights = [1.0, 1.0, 1.0]\ny = 1.0\nseed = 3\n"
    )
    code, out = run_cli(capsys, "run-n-party", "--scenario", str(p), "--json")
    assert code == 0
    assert json.loads(out)["display_re"] == pytest.approx(12.0, abs=1e-8)


def test_usage_errors_exit_two(capsys):
    assert main(["no-such-command"]) == 2
    assert main([]) == 2
    assert main(["run-two-party", "--tau", "7/3"]) == 2
    assert main(["run-two-party", "--scenario", "/nonexistent.toml"]) == 2
    capsys.readouterr()
