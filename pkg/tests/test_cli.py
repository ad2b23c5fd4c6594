"""Command-line behavior: exit codes, deterministic tables, sidecars."""

import json

import pytest

from emschro import acceptance, cli


def write_config(tmp_path, name, doc):
    path = tmp_path / name
    path.write_text(json.dumps(doc))
    return str(path)


@pytest.fixture()
def ab_config(tmp_path):
    return write_config(tmp_path, "ab.json", {
        "potential": {"a_coeffs": [[0.0, 0.0]], "A_coeffs": [[0.3, 0.0]]},
        "output_dir": str(tmp_path / "out"),
        "seed": 11,
        "spectrum": {"M": 32, "j_max": 12, "cluster_k_min": 10, "cluster_k_max": 16},
        "wkb": {"M": 32, "j_list": [8, -8, 10]},
        "kernel_scan": {"rho_max": 20.0, "n_rho": 60, "n_theta": 16},
        "decay": {"n_r": 256, "t_list": [0.1, 1.0, 10.0, 100.0]},
    })


def test_fmt_is_round_trip_exact():
    assert cli._fmt(0.1) == "0.10000000000000001"
    assert cli._fmt(True) == "true"
    assert cli._fmt(False) == "false"
    assert cli._fmt(7) == "7"
    assert float(cli._fmt(1.0 / 3.0)) == 1.0 / 3.0


def test_spectrum_writes_tables_and_sidecar(ab_config, tmp_path):
    assert cli.main(["spectrum", ab_config]) == 0
    out = tmp_path / "out"
    for name in ("eigenvalues.csv", "residuals.csv", "clusters.csv",
                 "eigenvalues.csv.meta.json"):
        assert (out / name).exists()
    meta = json.loads((out / "eigenvalues.csv.meta.json").read_text())
    assert set(meta) == {"config_hash", "seed", "thresholds", "versions"}
    assert meta["seed"] == 11
    assert meta["thresholds"]["resonance_class"] == "non_resonant"
    header = (out / "eigenvalues.csv").read_text().splitlines()[0]
    assert header == "k,mu"


def test_spectrum_output_is_deterministic(ab_config, tmp_path):
    assert cli.main(["spectrum", ab_config]) == 0
    first = (tmp_path / "out" / "eigenvalues.csv").read_bytes()
    assert cli.main(["spectrum", ab_config]) == 0
    assert (tmp_path / "out" / "eigenvalues.csv").read_bytes() == first


def test_output_dir_override(ab_config, tmp_path):
    other = tmp_path / "elsewhere"
    assert cli.main(["spectrum", ab_config, "--output-dir", str(other)]) == 0
    assert (other / "eigenvalues.csv").exists()


def test_wkb_command(ab_config, tmp_path):
    assert cli.main(["wkb", ab_config]) == 0
    lines = (tmp_path / "out" / "wkb.csv").read_text().splitlines()
    assert lines[0].startswith("j,branch")
    assert len(lines) == 4  # three requested indices


def test_kernel_scan_command(ab_config, tmp_path):
    assert cli.main(["kernel-scan", ab_config]) == 0
    assert (tmp_path / "out" / "kernel_scan.csv").exists()


def test_exit_code_hypothesis_violation(tmp_path):
    cfg = write_config(tmp_path, "neg.json", {
        "potential": {"a_coeffs": [[0.5, 0.0], [0.0, 0.0], [0.5, 0.0]],
                      "A_coeffs": [[0.3, 0.0]]},
        "output_dir": str(tmp_path / "out"),
        "kernel_scan": {"M": 48, "rho_max": 6.0, "n_rho": 10, "n_theta": 8},
    })
    assert cli.main(["kernel-scan", cfg]) == cli.EXIT_HYPOTHESIS


def test_exit_code_config_errors(tmp_path):
    assert cli.main(["spectrum", str(tmp_path / "nope.json")]) == cli.EXIT_CONFIG
    bad = write_config(tmp_path, "bad.json", {
        "potential": {"a_coeffs": [[0.0, 0.0]], "A_coeffs": [[0.3, 0.0]]},
        "spectrum": {"M": 32, "typo": 1},
    })
    assert cli.main(["spectrum", bad]) == cli.EXIT_CONFIG


def test_exit_code_resolution_failure(ab_config):
    # 256 radial points cannot satisfy the sampling rule at t = 0.1
    assert cli.main(["decay", ab_config]) == cli.EXIT_RESOLUTION


def test_validate_maps_results_to_exit_code(monkeypatch):
    def fake_all_pass(verbose=True):
        return [acceptance.CriterionResult(1, "x", True, "", 0.0)]

    def fake_one_fail(verbose=True):
        return [acceptance.CriterionResult(1, "x", True, "", 0.0),
                acceptance.CriterionResult(2, "y", False, "", 0.0)]

    monkeypatch.setattr(acceptance, "run_all", fake_all_pass)
    assert cli.main(["validate"]) == cli.EXIT_PASS
    monkeypatch.setattr(acceptance, "run_all", fake_one_fail)
    assert cli.main(["validate"]) == cli.EXIT_FAIL
