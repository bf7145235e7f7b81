import json
from pathlib import Path

import numpy as np

from kernelopt import Theta, certify, scenario_from_dict, solve_state
from kernelopt.cli import main
from kernelopt.model import Decision

CONFIG_DIR = Path(__file__).resolve().parents[1] / "src" / "kernelopt" / "configs"


def small_config(tmp_path, name="small", **overrides):
    doc = {
        "name": name,
        "c": 10.0,
        "T": 1.0,
        "n": 10,
        "m": 200,
        "y0": {"preset": "sin_pi"},
        "bounds": {"a1": -10, "b1": 10, "a2": -10, "b2": 10},
        "epsilon": 1.0,
        "initial_guess": {"theta1": -1.0, "theta2": 2.0, "alpha": 0.0},
    }
    doc.update(overrides)
    path = tmp_path / f"{name}.json"
    path.write_text(json.dumps(doc))
    return path


class TestOptimizeCommand:
    def test_artifacts_and_round_trip(self, tmp_path):
        cfg = small_config(tmp_path)
        out = tmp_path / "run"
        assert main(["optimize", "--config", str(cfg), "--out", str(out)]) == 0
        doc = json.loads((out / "report.json").read_text())
        for key, value in doc["artifacts"].items():
            assert Path(value).exists(), key
        for name in ("history.csv", "state.csv", "control.csv", "kernel.csv",
                     "charfun.csv", "state.png", "control.png", "kernel.png",
                     "charfun.png", "history.png"):
            assert (out / name).exists(), name

        # Re-certifying the reported decision reproduces the reported
        # spectral document exactly (end-to-end determinism).
        spec = scenario_from_dict(json.loads(cfg.read_text()), name="small")
        d = doc["decision"]
        spectral = certify(
            spec,
            Decision(Theta(d["theta1"], d["theta2"]), d["alpha"]),
            span_threshold=doc["spectral"]["span_threshold"],
            mode_count=doc["spectral"]["mode_count"],
        )
        assert spectral.to_dict() == doc["spectral"]

    def test_history_layout(self, tmp_path):
        cfg = small_config(tmp_path)
        out = tmp_path / "run"
        main(["optimize", "--config", str(cfg), "--out", str(out)])
        lines = (out / "history.csv").read_text().splitlines()
        assert lines[0] == "iteration,theta1,theta2,alpha,cost,violation,step"
        assert len(lines) >= 2

    def test_no_figures_flag(self, tmp_path):
        cfg = small_config(tmp_path)
        out = tmp_path / "run"
        main(["optimize", "--config", str(cfg), "--out", str(out), "--no-figures"])
        assert (out / "report.json").exists()
        assert not list(out.glob("*.png"))

    def test_multiple_configs_parallel(self, tmp_path):
        cfg_a = small_config(tmp_path, name="job_a")
        cfg_b = small_config(tmp_path, name="job_b", c=8.0)
        out = tmp_path / "runs"
        code = main([
            "optimize", "--config", str(cfg_a), "--config", str(cfg_b),
            "--out", str(out), "--parallel", "2", "--no-figures",
        ])
        assert code == 0
        assert (out / "job_a" / "report.json").exists()
        assert (out / "job_b" / "report.json").exists()


class TestSimulateCommand:
    def test_state_csv_round_trips_bitwise(self, tmp_path):
        cfg = small_config(tmp_path)
        out = tmp_path / "sim"
        assert main(["simulate", "--config", str(cfg), "--out", str(out),
                     "--theta1", "-1.0775", "--theta2", "0.5966"]) == 0
        spec = scenario_from_dict(json.loads(cfg.read_text()), name="small")
        state = solve_state(spec, Theta(-1.0775, 0.5966))
        parsed = np.loadtxt(out / "state.csv", delimiter=",")
        assert parsed.shape == (spec.grid.n + 1, spec.grid.m + 1)
        assert np.array_equal(parsed, state.y.values)
        control = np.loadtxt(out / "control.csv", delimiter=",", skiprows=1)
        assert np.array_equal(control[:, 1], state.u)

    def test_uncontrolled_emits_exact_comparison(self, tmp_path):
        cfg = small_config(tmp_path)
        out = tmp_path / "sim"
        assert main(["simulate", "--config", str(cfg), "--out", str(out)]) == 0
        doc = json.loads((out / "report.json").read_text())
        assert (out / "exact.csv").exists()
        assert doc["exact_discrepancy_max_norm"] > 0.0

    def test_controlled_run_skips_exact(self, tmp_path):
        cfg = small_config(tmp_path)
        out = tmp_path / "sim"
        main(["simulate", "--config", str(cfg), "--out", str(out),
              "--theta1", "-1.0", "--theta2", "0.5"])
        doc = json.loads((out / "report.json").read_text())
        assert "exact_discrepancy_max_norm" not in doc
        assert not (out / "exact.csv").exists()

    def test_closure_singularity_exit_code(self, tmp_path):
        cfg = small_config(tmp_path, name="singular", n=2, m=64, T=1.0)
        out = tmp_path / "sim"
        code = main(["simulate", "--config", str(cfg), "--out", str(out),
                     "--theta1", "2.0", "--theta2", "2.0"])
        assert code == 2
        doc = json.loads((out / "report.json").read_text())
        assert doc["error_type"] == "ClosureSingularityError"

    def test_blow_up_exit_code_and_time_index(self, tmp_path):
        cfg = small_config(tmp_path, name="hot", c=100.0, n=14, m=2000, T=1.0)
        out = tmp_path / "sim"
        code = main(["simulate", "--config", str(cfg), "--out", str(out)])
        assert code == 2
        doc = json.loads((out / "report.json").read_text())
        assert doc["error_type"] == "BlowUpError"
        assert 0 < doc["time_index"] <= 2000


class TestCertifyCommand:
    def test_reference_tables_emitted(self, tmp_path):
        out = tmp_path / "cert"
        code = main([
            "certify", "--config", str(CONFIG_DIR / "scenario1.json"),
            "--out", str(out), "--theta1", "-1.0775", "--theta2", "0.5966",
            "--alpha", "3.3486", "--span-N", "10",
            "--alpha-tol", "1e-4", "--feasibility-tol", "1e-3",
        ])
        assert code == 0
        rows = (out / "roots.csv").read_text().splitlines()
        assert rows[0] == "n,alpha,alpha_over_pi,sigma,Y,residual"
        assert len(rows) == 11
        first = rows[1].split(",")
        assert abs(float(first[1]) - 3.3486) < 5e-4
        assert (out / "charfun.csv").exists()

    def test_alpha_defaults_to_first_root(self, tmp_path):
        out = tmp_path / "cert"
        code = main([
            "certify", "--config", str(CONFIG_DIR / "scenario1.json"),
            "--out", str(out), "--theta1", "0.0", "--theta2", "0.0",
            "--span-N", "10", "--no-figures",
        ])
        assert code == 0
        doc = json.loads((out / "report.json").read_text())
        assert abs(doc["decision"]["alpha"] - np.pi) < 1e-9
        assert doc["spectral"]["stable"] is False
        assert "eigenvalue-margin" in doc["spectral"]["reasons"]


class TestErrorPaths:
    def test_malformed_config_exit_1_no_artifacts(self, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text("{not json")
        out = tmp_path / "nothing"
        code = main(["optimize", "--config", str(bad), "--out", str(out)])
        assert code == 1
        assert not out.exists()

    def test_missing_key_exit_1(self, tmp_path):
        bad = tmp_path / "incomplete.json"
        bad.write_text(json.dumps({"c": 10.0}))
        code = main(["optimize", "--config", str(bad), "--out", str(tmp_path / "x")])
        assert code == 1

    def test_usage_error_exit_1(self, capsys):
        assert main(["certify", "--config", "nope.json"]) == 1
        assert main(["bogus-command"]) == 1

    def test_invalid_grid_override_exit_1(self, tmp_path):
        cfg = small_config(tmp_path)
        code = main(["simulate", "--config", str(cfg), "--out", str(tmp_path / "x"),
                     "--m", "10"])
        assert code == 1


class TestBundledConfigs:
    def test_all_three_parse(self):
        for i, (c, eps) in enumerate([(10.0, 1.0), (11.0, 2.0), (14.0, 3.0)], start=1):
            doc = json.loads((CONFIG_DIR / f"scenario{i}.json").read_text())
            spec = scenario_from_dict(doc)
            assert spec.c == c
            assert spec.epsilon == eps
            assert spec.grid.n == 14 and spec.grid.m == 5000 and spec.grid.T == 4.0
