import csv
import io
import json
import math

import numpy as np
import pytest

from rgg_spectra.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def write_config(tmp_path, regime, taus=(0.0, 1.0), t=(300.0,), alpha=0.5, R=12, name="cfg.json"):
    cfg = {
        "params": {"d": 2, "taus": list(taus), "volume": 1.0, "regime": regime},
        "window": {"d": 2, "side": 1.0, "boundary_mode": "torus"},
        "schedule": {"kappa": 1.0, "alpha": alpha, "t": list(t)},
        "replications": R,
        "base_seed": 7,
    }
    path = tmp_path / name
    path.write_text(json.dumps(cfg))
    return str(path)


def read_long_csv(text):
    rows = [r for r in csv.reader(io.StringIO(text)) if r and not r[0].startswith("#")]
    assert rows[0] == ["name", "row", "col", "value"]
    return rows[1:]


def test_matrix_csv_supercritical(capsys):
    code, out, _ = run(capsys, "matrix", "--d", "2", "--taus", "0,1,2", "--volume", "1", "--regime", "supercritical", "--format", "csv")
    assert code == 0
    a = np.array([2.0, 3.0, 4.0])
    ref = 4 * math.pi**2 / np.outer(a, a)
    got = np.zeros((3, 3))
    for name, i, j, v in read_long_csv(out):
        if name == "sigma":
            got[int(i), int(j)] = float(v)
    assert np.allclose(got, ref, rtol=1e-15)


def test_matrix_csv_round_trip_is_exact(capsys, tmp_path):
    out_path = tmp_path / "m.csv"
    code, _, _ = run(capsys, "matrix", "--d", "3", "--taus", "-1.2,0.3,2", "--regime", "critical", "--c", "0.37", "--factor", "det,inverse", "--format", "csv", "--out", str(out_path))
    assert code == 0
    from rgg_spectra import ModelParams, RegimeSpec
    from rgg_spectra.closed_forms import build_sigma, cr_inverse

    p = ModelParams(d=3, taus=(-1.2, 0.3, 2.0), regime=RegimeSpec.critical(0.37))
    sigma = build_sigma(p).sigma
    inv = cr_inverse(p)
    for name, i, j, v in read_long_csv(out_path.read_text(encoding="utf-8")):
        if name == "sigma":
            assert float(v) == sigma[int(i), int(j)]
        if name == "inverse":
            assert float(v) == inv[int(i), int(j)]


def test_matrix_json_factors(capsys):
    code, out, _ = run(capsys, "matrix", "--natural", "3", "--regime", "critical", "--c", "2.5", "--factor", "lu,cross_lu", "--components")
    assert code == 0
    data = json.loads(out)
    assert {"sigma", "sigma_sb", "sigma_sp", "lu.L", "lu.U"} <= set(data["matrices"])
    assert data["scalars"]["cross_lu.holds"] is True
    assert data["params"]["regime"]["kind"] == "critical_high"


@pytest.mark.parametrize(
    "argv",
    [
        ["matrix", "--d", "2"],
        ["matrix", "--d", "2", "--taus", "1,0"],
        ["matrix", "--d", "2", "--taus", "0,x"],
        ["matrix", "--d", "2", "--taus", "0,1", "--regime", "critical"],
        ["matrix", "--d", "2", "--taus", "0,1", "--regime", "subcritical", "--factor", "root"],
        ["matrix", "--d", "2", "--taus", "0,1", "--factor", "nonsense"],
        ["matrix", "--d", "2", "--taus", "1,3,5", "--regime", "critical", "--c", "1", "--factor", "lu"],
        ["matrix", "--natural", "3", "--d", "3"],
        ["verify", "--natural", "2", "--rel-tol", "-1"],
        ["bogus"],
        ["simulate", "--config", "x.json", "--workers", "0"],
    ],
)
def test_usage_errors_exit_2(capsys, argv):
    assert main(argv) == 2


def test_regime_critical_one_is_low_branch(capsys):
    code, out, _ = run(capsys, "matrix", "--natural", "2", "--regime", "critical", "--c", "1.0")
    assert json.loads(out)["params"]["regime"]["kind"] == "critical_low"


def test_verify_critical_example_passes(capsys):
    code, out, _ = run(capsys, "verify", "--d", "2", "--taus", "0,1", "--regime", "critical", "--c", "1")
    assert code == 0
    assert "all checks passed" in out


def test_verify_failure_exit_1(capsys):
    code, _, _ = run(capsys, "verify", "--d", "3", "--taus", "-1.2,-0.4,0.5,1.1,2,3.3", "--regime", "subcritical", "--rel-tol", "1e-30")
    assert code == 1


def test_verify_grid_json(capsys, tmp_path):
    grid = [
        {"d": 2, "taus": [0, 1, 2], "regime": {"kind": "supercritical"}},
        {"d": 1, "taus": [0, 0.5, 2], "volume": 2.0, "regime": {"kind": "subcritical"}},
        {"d": 2, "taus": [0, 1, 2, 3], "regime": {"kind": "critical", "c": 2.5}},
    ]
    path = tmp_path / "grid.json"
    path.write_text(json.dumps(grid))
    code, out, _ = run(capsys, "verify", "--grid", str(path), "--format", "json", "--no-matrices")
    assert code == 0
    data = json.loads(out)
    assert data["ok"] and len(data["dossiers"]) == 3
    assert "matrices" not in data["dossiers"][0]
    path.write_text("{not json")
    assert main(["verify", "--grid", str(path)]) == 2


def test_verify_list_checks(capsys):
    code, out, _ = run(capsys, "verify", "--list-checks")
    assert code == 0 and "sp_root" in out


def test_simulate_replay_identical(capsys, tmp_path):
    cfg = write_config(tmp_path, {"kind": "critical", "c": 1.0})
    prefix_a, prefix_b = tmp_path / "a", tmp_path / "b"
    assert main(["simulate", "--config", cfg, "--workers", "1", "--out", str(prefix_a)]) == 0
    assert main(["simulate", "--config", cfg, "--workers", "3", "--out", str(prefix_b)]) == 0
    for ext in (".csv", ".json"):
        assert (tmp_path / f"a{ext}").read_bytes() == (tmp_path / f"b{ext}").read_bytes()
    assert main(["simulate", "--config", cfg, "--seed", "8", "--out", str(prefix_b)]) == 0
    assert (tmp_path / "a.csv").read_bytes() != (tmp_path / "b.csv").read_bytes()


def test_simulate_noise_check_and_regimes(capsys, tmp_path):
    crit = write_config(tmp_path, {"kind": "critical", "c": 1.0}, R=20)
    code, out, _ = run(capsys, "simulate", "--config", crit, "--check-92", "--workers", "1")
    assert code == 0
    data = json.loads(out)
    assert len(data["noise_decomposition"]) == 1
    sup = write_config(tmp_path, {"kind": "supercritical"}, alpha=0.25, name="sup.json")
    assert main(["simulate", "--config", sup, "--check-92"]) == 2
    assert main(["simulate", "--config", crit, "--check-91"]) == 2


def test_simulate_band_violation_exit_1(capsys, tmp_path):
    # a subcritical schedule compared against the supercritical limit
    cfg = write_config(tmp_path, {"kind": "supercritical"}, t=(300.0,), alpha=1.0, R=40)
    code, out, _ = run(capsys, "simulate", "--config", cfg, "--band", "0.15", "--workers", "1")
    assert code == 1
    assert json.loads(out)["assertions_passed"] is False


def test_simulate_bad_config(capsys, tmp_path):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"params": {"d": 2, "taus": [0, 1]}}))
    assert main(["simulate", "--config", str(path)]) == 2
    assert main(["simulate", "--config", str(tmp_path / "missing.json")]) == 2
    big = write_config(tmp_path, {"kind": "critical", "c": 1.0}, t=(4.0,), name="big.json")
    assert main(["simulate", "--config", big]) == 2


def test_convergence_difference_series(capsys, tmp_path):
    cfg = write_config(tmp_path, {"kind": "supercritical"}, t=(150.0, 300.0), alpha=0.25, R=10)
    code, out, _ = run(capsys, "convergence", "--config", cfg, "--difference", "0,1", "--workers", "1")
    assert code == 0
    assert "var_D" in out and "# slope" in out
    crit = write_config(tmp_path, {"kind": "critical", "c": 1.0}, name="c.json")
    assert main(["convergence", "--config", crit, "--difference", "0,1"]) == 2


def test_negative_powers_as_separate_argument(capsys):
    code, out, _ = run(capsys, "matrix", "--d", "2", "--taus", "-0.5,1", "--regime", "subcritical")
    assert code == 0
    assert json.loads(out)["params"]["taus"] == [-0.5, 1.0]


def test_version(capsys):
    code, out, _ = run(capsys, "version")
    assert code == 0 and out.startswith("rgg-spectra ")
