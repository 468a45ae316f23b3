import json
from pathlib import Path

import pytest

from qft_locality.infrastructure.config import (
    DEFAULT_EXPERIMENTS,
    RUN_CONFIG_SCHEMA,
    ConfigManager,
    RunConfig,
    load_run_config,
    run_config_from_dict,
)
from qft_locality.utils.exceptions import ConfigurationError, FileReadError

REPO_ROOT = Path(__file__).resolve().parents[1]


class TestConfigManager:
    def test_singleton(self):
        assert ConfigManager.get_instance() is ConfigManager.get_instance()

    def test_reads_settings_file(self, isolated_settings, tmp_path):
        assert isolated_settings.path == tmp_path / "settings.json"
        assert isolated_settings.get("CACHE_ENABLED") is False
        # 缺失的键用默认值补齐
        assert isolated_settings.get("MAX_FOCK_DIM") == 4096

    def test_set_persists(self, isolated_settings):
        isolated_settings.set("DEFAULT_THREAD_COUNT", 7)
        ConfigManager.reset_instance()
        assert ConfigManager.get_instance().get("DEFAULT_THREAD_COUNT") == 7

    def test_creates_default_file(self, tmp_path, monkeypatch):
        path = tmp_path / "nested" / "settings.json"
        monkeypatch.setenv("QFT_LOCALITY_SETTINGS", str(path))
        ConfigManager.reset_instance()
        manager = ConfigManager.get_instance()
        assert path.exists()
        assert manager.get("CACHE_ENABLED") is True


class TestRunConfig:
    def test_defaults_validate(self):
        config = RunConfig().validate()
        assert config.lattice.n_sites == 128
        assert config.times() == pytest.approx([-2.0, -1.5, -1.0, -0.5, 0.0, 0.5, 1.0, 1.5, 2.0])

    def test_round_trip_through_dict(self):
        data = RunConfig().to_dict()
        assert data["schema"] == RUN_CONFIG_SCHEMA
        assert run_config_from_dict(json.loads(json.dumps(data))) == RunConfig()

    def test_shipped_config_matches_defaults(self):
        assert load_run_config(str(REPO_ROOT / "config.json")) == RunConfig()

    def test_experiment_parameters_merge_defaults(self):
        config = run_config_from_dict({
            "schema": RUN_CONFIG_SCHEMA,
            "experiments": {"cyclicity": {"cutoffs": [2, 4]}},
        })
        params = config.experiment("cyclicity")
        assert params["cutoffs"] == [2, 4]
        assert params["tolerance"] == DEFAULT_EXPERIMENTS["cyclicity"]["tolerance"]
        with pytest.raises(ConfigurationError):
            config.experiment("nonsense")

    def test_standard_sweep_intervals(self):
        config = RunConfig().with_overrides(experiments={"cyclicity": {"standard_separations_sites": [1, 3]}})
        assert config.standard_sweep_intervals() == [(1, 2), (3, 4)]
        assert RunConfig().standard_sweep_intervals()[-1] == tuple(RunConfig().geometry.region2)

    def test_overrides(self):
        config = RunConfig().with_overrides(output_dir="out", seed=3,
                                            experiments={"microcausality": {"times": [0.0, 0.5]}})
        assert config.output_dir == "out"
        assert config.seed == 3
        assert config.experiment("microcausality")["times"] == [0.0, 0.5]
        assert config.experiment("microcausality")["n_sites"] == 512

    @pytest.mark.parametrize("patch", [
        {"lattice": {"mass": 0.0}},
        {"fock": {"cutoff": 9}},
        {"fock": {"n_modes": 7}},
        {"fock": {"n_modes": 3}},
        {"geometry": {"region2": [0, 2]}},
        {"geometry": {"time_window": [-5.0, 5.0]}},
        {"experiments": {"correlation": {"n_sites": 64}}},
        {"experiments": {"microcausality": {"times": [0.0, 1.0]}}},
        {"experiments": {"cyclicity": {"cutoffs": [12]}}},
        {"experiments": {"cyclicity": {"standard_separations_sites": [0]}}},
        {"experiments": {"cyclicity": {"standard_separations_sites": [128]}}},
        {"experiments": {"unknown": {}}},
    ])
    def test_invalid_configs(self, patch):
        data = {"schema": RUN_CONFIG_SCHEMA, **patch}
        with pytest.raises(ConfigurationError):
            run_config_from_dict(data).validate()

    def test_schema_and_unknown_keys(self):
        with pytest.raises(ConfigurationError):
            run_config_from_dict({"schema": "other"})
        with pytest.raises(ConfigurationError):
            run_config_from_dict({"schema": RUN_CONFIG_SCHEMA, "extra": 1})
        with pytest.raises(ConfigurationError):
            run_config_from_dict({"schema": RUN_CONFIG_SCHEMA, "lattice": {"sites": 4}})


class TestLoadRunConfig:
    def test_none_gives_defaults(self):
        assert load_run_config(None) == RunConfig()

    def test_missing_file(self, tmp_path):
        with pytest.raises(FileReadError) as excinfo:
            load_run_config(str(tmp_path / "absent.json"))
        assert "absent.json" in str(excinfo.value)

    def test_malformed_json(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text("{not json", encoding="utf-8")
        with pytest.raises(FileReadError):
            load_run_config(str(path))
