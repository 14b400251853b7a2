import json

import numpy as np
import pytest

from covplan import (
    DataFormatError,
    EnvGenParams,
    PlanConfig,
    ScalarField,
    generate_environment,
    path_length,
    plan,
)
from covplan.formats import (
    SUMMARY_COLUMNS,
    TRIAL_COLUMNS,
    cellset_to_text,
    environment_to_text,
    field_to_text,
    load_environment,
    load_field,
    load_plan,
    load_sweep_config,
    plan_to_text,
    render_layers,
    save_environment,
    save_field,
    save_plan,
)


def example_env(seed=7):
    return generate_environment(EnvGenParams(
        width=18, height=14, distribution_density=0.3,
        distribution_heterogeneity=0.3, obstacle_density=0.08,
        obstacle_heterogeneity=0.5, seed=seed))


class TestEnvironmentFormat:
    def test_round_trip_bytes(self, tmp_path):
        env = example_env()
        path = tmp_path / "env.json"
        save_environment(env, path)
        text = path.read_text()
        save_environment(load_environment(path), path)
        assert path.read_text() == text

    def test_round_trip_values_at_precision(self, tmp_path):
        env = example_env()
        path = tmp_path / "env.json"
        save_environment(env, path)
        loaded = load_environment(path)
        assert np.abs(loaded.distribution.values - env.distribution.values).max() < 1e-8
        assert np.array_equal(loaded.hotspot_map, env.hotspot_map)
        assert np.array_equal(loaded.obstacle_map.cells, env.obstacle_map.cells)
        assert loaded.params == env.params
        assert loaded.distribution_sigma == env.distribution_sigma

    def test_distribution_written_at_nine_significant_digits(self):
        env = example_env()
        doc = json.loads(environment_to_text(env))
        for v in doc["distribution"][:50]:
            assert float("%.9g" % v) == v

    def test_not_json_rejected(self, tmp_path):
        p = tmp_path / "bad.json"
        p.write_text("not json at all")
        with pytest.raises(DataFormatError):
            load_environment(p)

    def test_wrong_format_tag_rejected(self, tmp_path):
        p = tmp_path / "bad.json"
        p.write_text(json.dumps({"format": "something-else"}))
        with pytest.raises(DataFormatError):
            load_environment(p)

    def test_truncated_arrays_rejected(self, tmp_path):
        env = example_env()
        doc = json.loads(environment_to_text(env))
        doc["hotspot"] = doc["hotspot"][:-1]
        p = tmp_path / "bad.json"
        p.write_text(json.dumps(doc))
        with pytest.raises(DataFormatError):
            load_environment(p)


class TestPlanFormat:
    def test_round_trip(self, tmp_path):
        env = example_env()
        pl = plan(env, PlanConfig(sample_spacing=3, preprocess=True))
        length = path_length(pl)
        path = tmp_path / "plan.json"
        save_plan(pl, length, path)
        loaded = load_plan(path)
        assert loaded == pl
        # canonical writer: re-save byte-identical
        assert plan_to_text(loaded, length) == path.read_text()

    def test_malformed_plan_rejected(self, tmp_path):
        p = tmp_path / "plan.json"
        p.write_text(json.dumps({"format": "covplan-plan", "version": 1}))
        with pytest.raises(DataFormatError):
            load_plan(p)


class TestFieldFormat:
    def test_round_trip(self, tmp_path):
        field = ScalarField(np.random.default_rng(3).random((6, 9)))
        p = tmp_path / "f.field"
        save_field(field, p)
        loaded = load_field(p)
        assert np.abs(loaded.values - field.values).max() < 1e-8
        assert field_to_text(loaded) == p.read_text()

    def test_bad_header(self, tmp_path):
        p = tmp_path / "f.field"
        p.write_text("nonsense 3 3\n")
        with pytest.raises(DataFormatError):
            load_field(p)


class TestRenderLayers:
    def test_env_only(self):
        env = example_env()
        layers = render_layers(env)
        assert set(layers) == {"distribution", "obstacles"}
        assert len(layers["distribution"].splitlines()) == env.height
        assert len(layers["obstacles"].splitlines()[0].split(",")) == env.width

    def test_with_plan_point_counts(self):
        env = example_env()
        pl = plan(env, PlanConfig(sample_spacing=2))
        layers = render_layers(env, pl)
        assert len(layers["path"].splitlines()) == len(pl.path) + 1
        assert len(layers["samples"].splitlines()) == len(pl.samples) + 1

    def test_error_layer_masks_obstacles(self):
        env = example_env()
        pl = plan(env, PlanConfig(sample_spacing=2))
        from covplan import SampleSet, interpolate
        est = interpolate(SampleSet.from_field(pl.samples, env.distribution),
                          (env.width, env.height)).field
        layers = render_layers(env, pl, est)
        rows = [line.split(",") for line in layers["error"].splitlines()]
        for y in range(env.height):
            for x in range(env.width):
                if env.obstacle_map.cells[y, x]:
                    assert rows[y][x] == "nan"
                else:
                    expect = abs(env.distribution.values[y, x] - est.values[y, x])
                    assert float(rows[y][x]) == pytest.approx(expect, abs=1e-8)

    def test_dimension_mismatch_rejected(self):
        env = example_env()
        with pytest.raises(DataFormatError):
            render_layers(env, None, ScalarField(np.zeros((3, 3))))


class TestSweepConfigFile:
    def test_load_full_config(self, tmp_path):
        doc = {
            "swept_parameter": "sample_spacing",
            "values": [1, 2, 4],
            "trials_per_value": 10,
            "env_arms": [
                {"distribution_density": 0.5, "distribution_heterogeneity": 0.1,
                 "obstacle_density": 0.05, "obstacle_heterogeneity": 0.1},
                {"distribution_density": [0.1, 0.5], "distribution_heterogeneity": 0.75,
                 "obstacle_density": 0.05, "obstacle_heterogeneity": 0.1},
            ],
            "preprocess_arms": [False, True],
            "width": 25, "height": 25,
        }
        p = tmp_path / "sweep.json"
        p.write_text(json.dumps(doc))
        cfg = load_sweep_config(p)
        assert cfg.values == (1, 2, 4)
        assert cfg.env_arms[1].distribution_density == (0.1, 0.5)
        assert cfg.preprocess_arms == (False, True)
        assert cfg.width == 25

    def test_missing_keys_rejected(self, tmp_path):
        p = tmp_path / "sweep.json"
        p.write_text(json.dumps({"values": [1]}))
        with pytest.raises(DataFormatError):
            load_sweep_config(p)

    def test_bad_range_rejected(self, tmp_path):
        p = tmp_path / "sweep.json"
        p.write_text(json.dumps({
            "swept_parameter": "sample_spacing", "values": [1],
            "trials_per_value": 1,
            "env_arms": [{"distribution_density": [0.1, 0.5, 0.9],
                          "distribution_heterogeneity": 0.1,
                          "obstacle_density": 0.0, "obstacle_heterogeneity": 0.1}],
        }))
        with pytest.raises(DataFormatError):
            load_sweep_config(p)


class TestCsvSchemas:
    def test_summary_columns_frozen(self):
        assert SUMMARY_COLUMNS == (
            "spacing", "dist_density", "dist_heterogeneity", "obs_density",
            "obs_heterogeneity", "preprocess", "N", "N_valid",
            "rmse_mean", "rmse_std", "rmse_stderr",
            "hmr_mean", "hmr_std", "hmr_stderr",
            "path_length_mean", "path_length_std", "path_length_stderr",
            "sample_count_mean", "sample_count_std", "sample_count_stderr",
        )

    def test_trial_columns_frozen(self):
        assert TRIAL_COLUMNS[:2] == ("arm_index", "trial_index")
        assert TRIAL_COLUMNS[-5:] == ("rmse", "hmr", "path_length",
                                      "sample_count", "hotspot_count")


def test_cellset_dump_stable():
    from covplan import OccupancyGrid, decompose
    cells = np.zeros((6, 6), dtype=np.uint8)
    cells[2:4, 2:4] = 1
    text = cellset_to_text(decompose(OccupancyGrid(cells)))
    assert text.startswith("cells 4 grid 6x6\n")
    assert "cell 1 columns 0..1" in text
