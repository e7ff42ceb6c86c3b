import json
import math

import numpy as np
import pytest

from priorcs.harness import (CSV_SCHEMA, ExperimentConfig, gaussian_ensemble, gaussian_radius_ds,
                             gaussian_radius_l2, main, parse_index_set, read_matrix, read_vector,
                             records_to_csv, run_sweep, run_trial, write_matrix, write_vector)


def _cfg(tmp_path, **over):
    d = {
        "matrix_source": {"gaussian": {"n": 12, "N": 24, "seed": 7}},
        "signal": {"k": 2, "distribution": "gaussian", "seed": 11},
        "estimate": {"rho": 1, "alpha": 1, "seed": 3},
        "omega_grid": [0.0, 1.0],
        "noise": {"kind": "exact"},
        "guarantee": [1, 1],
        "trials": 4,
        "output": str(tmp_path / "out.csv"),
    }
    d.update(over)
    return ExperimentConfig.from_dict(d)


def test_gaussian_radius_l2():
    assert gaussian_radius_l2(0, 10) == 0
    assert gaussian_radius_l2(1, 100) == pytest.approx(11.955, abs=5e-4)
    vals = [gaussian_radius_l2(1, n) for n in range(2, 10001)]
    assert all(a < b for a, b in zip(vals, vals[1:]))
    with pytest.raises(ValueError):
        gaussian_radius_l2(1, 1)


def test_gaussian_radius_ds():
    assert gaussian_radius_ds(0, 10) == 0
    assert gaussian_radius_ds(1, 1000) == pytest.approx(3.7169, abs=5e-5)
    assert gaussian_radius_ds(2, 50) == pytest.approx(2 * gaussian_radius_ds(1, 50))
    with pytest.raises(ValueError):
        gaussian_radius_ds(1, 1)


def test_gaussian_ensemble_unit_columns():
    A = gaussian_ensemble(5, 9, 0)
    assert np.allclose(np.linalg.norm(A, axis=0), 1)
    assert np.array_equal(A, gaussian_ensemble(5, 9, 0))


def test_io_roundtrip(tmp_path):
    A = np.random.default_rng(0).standard_normal((3, 4))
    write_matrix(tmp_path / "A.csv", A)
    assert np.array_equal(read_matrix(tmp_path / "A.csv"), A)
    v = np.array([1 / 3, -2.5, 1e-300])
    write_vector(tmp_path / "v.csv", v)
    assert np.array_equal(read_vector(tmp_path / "v.csv"), v)
    assert parse_index_set("3, 0,5") == (0, 3, 5)
    assert parse_index_set("") == ()
    with pytest.raises(ValueError):
        parse_index_set("1,a")
    with pytest.raises(OSError, match="missing.csv"):
        read_matrix(tmp_path / "missing.csv")


def test_config_validation(tmp_path):
    with pytest.raises(ValueError, match="omega_grid"):
        _cfg(tmp_path, omega_grid=[])
    with pytest.raises(ValueError, match="trials"):
        _cfg(tmp_path, trials=0)
    with pytest.raises(ValueError, match="seed"):
        _cfg(tmp_path, signal={"k": 2})
    with pytest.raises(ValueError, match="unknown"):
        _cfg(tmp_path, bogus=1)
    with pytest.raises(ValueError, match="guarantee"):
        _cfg(tmp_path, guarantee="best")


def test_identity_single_row(tmp_path):
    write_matrix(tmp_path / "I.csv", np.eye(6))
    cfg = _cfg(tmp_path, matrix_source={"file": str(tmp_path / "I.csv")}, omega_grid=[1.0], trials=1)
    records, summary = run_sweep(cfg)
    assert len(records) == 1 and records[0].error == 0
    assert records[0].certification == "certified" and records[0].bound_satisfied
    lines = (tmp_path / "out.csv").read_text().splitlines()
    assert lines[0] == f"# {CSV_SCHEMA}" and len(lines) == 3
    assert json.loads((tmp_path / "out.summary.json").read_text())["rows"] == 1


def test_exact_trial_recovers(tmp_path):
    cfg = _cfg(tmp_path)
    rec = run_trial(cfg, 0, 0.0)
    assert rec.certification == "certified"
    assert rec.error <= 1e-6 and rec.bound_satisfied and rec.cone_ok


def test_trial_determinism(tmp_path):
    cfg = _cfg(tmp_path, noise={"kind": "l2", "epsilon": 0.01, "eta": 0.01})
    a, b = run_trial(cfg, 2, 0.0), run_trial(cfg, 2, 0.0)
    assert records_to_csv([a]) == records_to_csv([b])


def test_sweep_byte_identical(tmp_path):
    cfg = _cfg(tmp_path, noise={"kind": "dantzig", "epsilon": 0.01, "eta": 0.01})
    run_sweep(cfg)
    first = (tmp_path / "out.csv").read_bytes()
    run_sweep(cfg)
    assert (tmp_path / "out.csv").read_bytes() == first


def test_omega_zero_not_worse_with_exact_estimate(tmp_path):
    cfg = _cfg(tmp_path, noise={"kind": "l2", "epsilon": 0.01, "eta": 0.01}, trials=10)
    _, summary = run_sweep(cfg)
    per = summary["per_omega"]
    assert per["0"]["mean_error"] <= per["1"]["mean_error"]


def test_sweep_selects_best_pair_and_reports_constants(tmp_path):
    cfg = _cfg(tmp_path, guarantee={"sweep": {"max_a": 2, "max_b": 3}},
               estimate={"rho": 1, "alpha": "1/2", "seed": 3}, omega_grid=[0.0, 0.5, 1.0],
               noise={"kind": "l2", "epsilon": 0.01, "eta": 0.01}, trials=2)
    records, summary = run_sweep(cfg)
    assert summary["bound_violations"] == 0
    assert all(r.a is not None for r in records)
    # alpha = 1/2 makes the condition independent of omega
    values = {r.condition_value for r in records}
    assert len(values) == 1


def test_uncertified_when_budget_too_small(tmp_path):
    cfg = _cfg(tmp_path, budget=5, trials=1)
    rec = run_trial(cfg, 0)
    assert rec.certification == "uncertified" and rec.bound_rhs is None and rec.bound_satisfied is None


def test_gaussian_noise_rows(tmp_path):
    cfg = _cfg(tmp_path, noise={"kind": "gaussian", "sigma": 0.001}, trials=3)
    records, summary = run_sweep(cfg)
    for r in records:
        assert r.epsilon == pytest.approx(gaussian_radius_l2(0.001, 12))
        if r.noise_in_set and r.certification == "certified":
            assert r.bound_satisfied
    cfg = _cfg(tmp_path, noise={"kind": "gaussian", "sigma": 0.001}, noise_program="dantzig", trials=2)
    rec = run_trial(cfg, 0)
    assert rec.epsilon == pytest.approx(gaussian_radius_ds(0.001, 24))


def test_compressible_signal(tmp_path):
    cfg = _cfg(tmp_path, signal={"k": 2, "seed": 5, "tail": 0.01},
               noise={"kind": "l2", "epsilon": 0.01, "eta": 0.01})
    records, summary = run_sweep(cfg)
    assert summary["bound_violations"] == 0
    assert all(r.cone_ok for r in records if r.status == "Optimal")


# -- CLI --------------------------------------------------------------------

def test_cli_solve(tmp_path, capsys):
    A = gaussian_ensemble(6, 12, 1)
    x = np.zeros(12)
    x[[1, 4]] = [1.0, -1.0]
    write_matrix(tmp_path / "A.csv", A)
    write_vector(tmp_path / "y.csv", A @ x)
    code = main(["solve", "--matrix", str(tmp_path / "A.csv"), "--y", str(tmp_path / "y.csv"),
                 "--estimate", "1,4", "--omega", "0.5", "--output", str(tmp_path / "x.csv")])
    assert code == 0
    out = json.loads(capsys.readouterr().out)
    assert out["status"] == "Optimal"
    assert np.allclose(read_vector(tmp_path / "x.csv"), x, atol=1e-6)


def test_cli_solve_nonconvergence_and_infeasible(tmp_path, capsys):
    A = gaussian_ensemble(6, 12, 2)
    write_matrix(tmp_path / "A.csv", A)
    write_vector(tmp_path / "y.csv", A @ np.random.default_rng(0).standard_normal(12))
    args = ["solve", "--matrix", str(tmp_path / "A.csv"), "--y", str(tmp_path / "y.csv")]
    assert main(args + ["--kind", "dantzig", "--eta", "0.01", "--max-iterations", "3"]) == 3
    write_matrix(tmp_path / "B.csv", np.ones((3, 2)))
    write_vector(tmp_path / "z.csv", [1.0, 0.0, 0.0])
    assert main(["solve", "--matrix", str(tmp_path / "B.csv"), "--y", str(tmp_path / "z.csv")]) == 1


def test_cli_rip(tmp_path, capsys):
    write_matrix(tmp_path / "A.csv", gaussian_ensemble(4, 8, 0))
    assert main(["rip", "--matrix", str(tmp_path / "A.csv"), "--delta", "2", "--theta", "1", "2"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert "2" in out["delta"] and "1,2" in out["theta"]
    assert main(["rip", "--matrix", str(tmp_path / "A.csv"), "--delta", "3", "--budget", "10"]) == 2
    assert main(["rip", "--matrix", str(tmp_path / "A.csv"), "--delta", "3", "--randomized", "50"]) == 0


def test_cli_bounds(capsys):
    code = main(["bounds", "--k", "8", "--a", "4", "--b", "8", "--omega", "0", "--rho", "1",
                 "--alpha", "1", "--delta", "0.1", "--theta", "0.2"])
    assert code == 0
    out = json.loads(capsys.readouterr().out)
    assert out["s"] == 4 and out["condition_met"] and math.isclose(out["D0"], math.sqrt(4.4) / 0.7)
    assert main(["bounds", "--k", "2", "--a", "3", "--b", "1", "--omega", "0", "--rho", "1",
                 "--alpha", "1", "--delta", "0.1", "--theta", "0.2"]) == 1


def test_cli_sharpness(tmp_path, capsys):
    code = main(["sharpness", "--N", "8", "--k", "4", "--a", "2", "--b", "2", "--rho", "1",
                 "--alpha", "1", "--omega", "0", "--save-dir", str(tmp_path)])
    assert code == 0
    out = json.loads(capsys.readouterr().out)
    assert out["recovery_fails"] and abs(out["condition_value"] - 1) < 1e-9
    assert read_matrix(tmp_path / "A.csv").shape == (8, 8)
    assert main(["sharpness", "--N", "12", "--k", "4", "--a", "2", "--b", "2", "--rho", "1",
                 "--alpha", "1/2", "--omega", "0.5"]) == 1


def test_cli_sweep(tmp_path, capsys):
    cfg = {
        "matrix_source": {"gaussian": {"n": 6, "N": 10, "seed": 1}},
        "signal": {"k": 1, "seed": 2},
        "estimate": {"rho": 1, "alpha": 1, "seed": 3},
        "omega_grid": [0.5],
        "noise": {"kind": "exact"},
        "guarantee": "sweep",
        "trials": 2,
        "output": str(tmp_path / "s.csv"),
    }
    (tmp_path / "cfg.json").write_text(json.dumps(cfg))
    assert main(["sweep", "--config", str(tmp_path / "cfg.json")]) == 0
    assert json.loads(capsys.readouterr().out)["rows"] == 2
    assert main(["sweep", "--config", str(tmp_path / "nope.json")]) == 1
