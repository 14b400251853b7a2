import json
import os
import subprocess
import sys

import numpy as np
import pytest

from covplan.cli import main
from covplan.formats import load_environment, load_plan


def run_cli(*args):
    return main(list(args))


@pytest.fixture
def env_file(tmp_path):
    out = tmp_path / "env.json"
    code = run_cli("generate", "--size", "20", "--dist-density", "0.3",
                   "--dist-het", "0.3", "--obs-density", "0.08",
                   "--obs-het", "0.5", "--seed", "7", "--out", str(out))
    assert code == 0
    return out


class TestGenerate:
    def test_measured_density_in_band(self, tmp_path):
        out = tmp_path / "env.json"
        assert run_cli("generate", "--size", "30", "--dist-density", "0.5",
                       "--dist-het", "0.1", "--seed", "7", "--out", str(out)) == 0
        env = load_environment(out)
        measured = env.hotspot_map.mean()
        assert 0.48 <= measured <= 0.52

    def test_zero_obstacle_density(self, tmp_path):
        out = tmp_path / "env.json"
        assert run_cli("generate", "--size", "12", "--dist-density", "0.3",
                       "--dist-het", "0.2", "--obs-density", "0",
                       "--seed", "3", "--out", str(out)) == 0
        env = load_environment(out)
        assert env.obstacle_map.free_count() == 144

    def test_same_flags_same_bytes(self, tmp_path):
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        args = ["generate", "--size", "15", "--dist-density", "0.2",
                "--dist-het", "0.4", "--seed", "11"]
        assert run_cli(*args, "--out", str(a)) == 0
        assert run_cli(*args, "--out", str(b)) == 0
        assert a.read_bytes() == b.read_bytes()

    def test_invalid_range_is_usage_error(self, tmp_path):
        code = run_cli("generate", "--size", "10", "--dist-density", "1.5",
                       "--dist-het", "0.1", "--seed", "1",
                       "--out", str(tmp_path / "x.json"))
        assert code == 2

    def test_missing_seed_is_usage_error(self, tmp_path):
        with pytest.raises(SystemExit) as exc:
            run_cli("generate", "--size", "10", "--dist-density", "0.5",
                    "--dist-het", "0.1", "--out", str(tmp_path / "x.json"))
        assert exc.value.code == 2


class TestPlanCommand:
    def test_spacing_one_samples_all_free_cells(self, tmp_path, env_file):
        out = tmp_path / "plan.json"
        assert run_cli("plan", str(env_file), "--spacing", "1",
                       "--out", str(out)) == 0
        env = load_environment(env_file)
        pl = load_plan(out)
        # all free cells are reachable in this environment
        assert pl.sample_count == env.obstacle_map.free_count()

    def test_preprocess_shortens_on_thin_maps(self, tmp_path):
        env_path = tmp_path / "thin.json"
        assert run_cli("generate", "--size", "30", "--dist-density", "0.3",
                       "--dist-het", "0.3", "--obs-density", "0.15",
                       "--obs-het", "0.75", "--seed", "40000",
                       "--out", str(env_path)) == 0
        p1, p2 = tmp_path / "a.json", tmp_path / "b.json"
        assert run_cli("plan", str(env_path), "--spacing", "4", "--out", str(p1)) == 0
        assert run_cli("plan", str(env_path), "--spacing", "4", "--preprocess",
                       "--out", str(p2)) == 0
        without = json.loads(p1.read_text())["summary"]["path_length"]
        with_pre = json.loads(p2.read_text())["summary"]["path_length"]
        assert with_pre < without

    def test_missing_spacing_is_usage_error(self, tmp_path, env_file):
        with pytest.raises(SystemExit) as exc:
            run_cli("plan", str(env_file), "--out", str(tmp_path / "p.json"))
        assert exc.value.code == 2

    def test_unreadable_env_is_data_error(self, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text("{broken")
        assert run_cli("plan", str(bad), "--spacing", "1",
                       "--out", str(tmp_path / "p.json")) == 1

    def test_missing_env_file_is_data_error(self, tmp_path):
        assert run_cli("plan", str(tmp_path / "nope.json"), "--spacing", "1",
                       "--out", str(tmp_path / "p.json")) == 1


class TestEvaluateCommand:
    def test_metrics_row_written(self, tmp_path, env_file):
        plan_path = tmp_path / "plan.json"
        run_cli("plan", str(env_file), "--spacing", "2", "--out", str(plan_path))
        out = tmp_path / "m.csv"
        est = tmp_path / "est.field"
        assert run_cli("evaluate", str(env_file), str(plan_path),
                       "--out", str(out), "--est-out", str(est)) == 0
        lines = out.read_text().splitlines()
        assert lines[0] == "rmse,hmr,path_length,sample_count,hotspot_count"
        cells = lines[1].split(",")
        assert float(cells[0]) >= 0.0
        assert est.exists()


class TestRenderCommand:
    def test_layer_files(self, tmp_path, env_file):
        plan_path = tmp_path / "plan.json"
        run_cli("plan", str(env_file), "--spacing", "2", "--out", str(plan_path))
        prefix = str(tmp_path / "vis")
        assert run_cli("render", str(env_file), "--plan", str(plan_path),
                       "--out", prefix) == 0
        for layer in ("distribution", "obstacles", "path", "samples"):
            assert os.path.exists(f"{prefix}.{layer}.csv")
        pl = load_plan(plan_path)
        with open(f"{prefix}.path.csv") as f:
            assert len(f.read().splitlines()) == len(pl.path) + 1

    def test_mismatched_dimensions_exit_1(self, tmp_path, env_file):
        other = tmp_path / "small.json"
        run_cli("generate", "--size", "10", "--dist-density", "0.3",
                "--dist-het", "0.3", "--seed", "1", "--out", str(other))
        plan_path = tmp_path / "plan.json"
        run_cli("plan", str(other), "--spacing", "1", "--out", str(plan_path))
        est = tmp_path / "est.field"
        run_cli("evaluate", str(other), str(plan_path),
                "--out", str(tmp_path / "m.csv"), "--est-out", str(est))
        assert run_cli("render", str(env_file), "--estimate", str(est),
                       "--out", str(tmp_path / "vis")) == 1


class TestSweepCommand:
    def test_sweep_outputs_and_job_independence(self, tmp_path):
        cfg = {
            "swept_parameter": "sample_spacing",
            "values": [2, 4],
            "trials_per_value": 4,
            "env_arms": [{"distribution_density": 0.3,
                          "distribution_heterogeneity": 0.3,
                          "obstacle_density": 0.05,
                          "obstacle_heterogeneity": 0.1}],
            "width": 15, "height": 15,
        }
        cfg_path = tmp_path / "sweep.json"
        cfg_path.write_text(json.dumps(cfg))
        d1, d2 = tmp_path / "out1", tmp_path / "out2"
        assert run_cli("sweep", str(cfg_path), "--master-seed", "5",
                       "--out-dir", str(d1), "--jobs", "1", "--trials-csv") == 0
        assert run_cli("sweep", str(cfg_path), "--master-seed", "5",
                       "--out-dir", str(d2), "--jobs", "2", "--trials-csv") == 0
        assert (d1 / "summary.csv").read_bytes() == (d2 / "summary.csv").read_bytes()
        assert (d1 / "trials.csv").read_bytes() == (d2 / "trials.csv").read_bytes()

    def test_rerun_overwrites_identically(self, tmp_path):
        cfg_path = tmp_path / "sweep.json"
        cfg_path.write_text(json.dumps({
            "swept_parameter": "sample_spacing", "values": [2],
            "trials_per_value": 2,
            "env_arms": [{"distribution_density": 0.3,
                          "distribution_heterogeneity": 0.3,
                          "obstacle_density": 0.0,
                          "obstacle_heterogeneity": 0.1}],
            "width": 10, "height": 10,
        }))
        d = tmp_path / "out"
        run_cli("sweep", str(cfg_path), "--master-seed", "9", "--out-dir", str(d))
        first = (d / "summary.csv").read_bytes()
        run_cli("sweep", str(cfg_path), "--master-seed", "9", "--out-dir", str(d))
        assert (d / "summary.csv").read_bytes() == first


def test_console_entry_point_runs():
    proc = subprocess.run([sys.executable, "-m", "covplan.cli", "--help"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert "generate" in proc.stdout
