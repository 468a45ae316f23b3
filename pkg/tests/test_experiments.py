import io
import json

import pandas as pd
import pytest

from qft_locality.core.experiments import (
    EXPERIMENTS,
    BaseExperiment,
    ExperimentOutput,
    ExperimentResult,
    frame_to_csv,
    report_to_json,
    run_experiment,
)
from qft_locality.infrastructure.config import RUN_CONFIG_SCHEMA, run_config_from_dict
from qft_locality.utils.exceptions import ExperimentError

SMALL_EXPERIMENTS = {
    "antilocality": {"masses": [1.0], "n_sites": 512, "spacing": 0.05, "samples": 5},
    "vacuum": {"profile_n_sites": 256, "probe_sites": 2},
    "cyclicity": {
        "cutoffs": [2, 3],
        "random_vectors": 3,
        "separating_samples": 40,
        "time_grids": [[0.0], [0.0, 1.0]],
    },
    "microcausality": {"n_sites": 256, "spacing": 0.05, "separations_sites": [20, 80]},
    "compare-schemes": {"separating_samples": 40},
    "correlation": {"masses": [1.0], "n_sites": 512, "spacing": 0.05},
}


@pytest.fixture
def small_config(tmp_path):
    return run_config_from_dict({
        "schema": RUN_CONFIG_SCHEMA,
        "geometry": {"time_steps": 5},
        "experiments": SMALL_EXPERIMENTS,
        "output_dir": str(tmp_path / "results"),
    }).validate()


def read_table(output: ExperimentOutput, series: str) -> pd.DataFrame:
    return pd.read_csv(io.StringIO(output.tables[series]))


def test_registry_names():
    assert sorted(EXPERIMENTS) == [
        "antilocality", "compare-schemes", "correlation", "cyclicity", "microcausality", "vacuum",
    ]
    assert all(issubclass(cls, BaseExperiment) for cls in EXPERIMENTS.values())


def test_unknown_experiment(small_config):
    with pytest.raises(ExperimentError):
        run_experiment("teleportation", small_config)


def test_csv_and_json_rendering():
    frame = pd.DataFrame({"x": [1, 2], "y": [0.1 + 0.2, 1.0 / 3.0]})
    text = frame_to_csv(frame)
    assert text == "x,y\n1,0.3\n2,0.333333333333\n"
    report = report_to_json({"b": 1.5, "a": [True, 2]})
    assert report == '{\n  "a": [\n    true,\n    2\n  ],\n  "b": 1.5\n}\n'


class TestAntilocality:
    def test_tables_and_checks(self, small_config):
        output = run_experiment("antilocality", small_config)
        tails = read_table(output, "tails")
        decay = read_table(output, "decay")
        assert len(tails) == 5
        assert (tails["tail_ratio"] > 1e-8).all()
        assert list(decay.columns) == [
            "mass", "n_sites", "spacing", "fitted_rate", "lattice_rate", "relative_error", "n_points",
        ]
        report = output.report_data
        assert report["checks"] == {"decay_rate_within_20pct": True, "tails_positive": True}
        assert report["experiment"] == "antilocality"

    def test_reproducible(self, small_config):
        first = run_experiment("antilocality", small_config)
        second = run_experiment("antilocality", small_config, thread=1)
        assert first.tables == second.tables
        assert first.report == second.report


class TestVacuum:
    def test_defects_and_purity(self, small_config):
        output = run_experiment("vacuum", small_config)
        defects = read_table(output, "defects")
        assert set(defects["scheme"]) == {"standard", "newton-wigner"}
        checks = output.report_data["checks"]
        assert checks["standard_adjacent_defect_positive"]
        assert checks["newton_wigner_defect_zero"]
        assert checks["standard_reduced_state_mixed"]
        assert checks["newton_wigner_reduced_state_pure"]
        purity = read_table(output, "purity")
        assert len(purity) == 4


class TestCyclicity:
    def test_rank_dichotomy(self, small_config):
        output = run_experiment("cyclicity", small_config)
        ranks = read_table(output, "ranks")
        by_algebra = {(r.scheme, r.algebra): r.rank for r in ranks.itertuples()}
        assert by_algebra[("standard", "region1")] <= 16
        assert by_algebra[("newton-wigner", "region1")] == 4
        assert by_algebra[("newton-wigner", "region1+region2")] == 16
        checks = output.report_data["checks"]
        assert checks["standard_vacuum_cyclic"]
        assert checks["newton_wigner_rank_is_factor_dim"]
        assert checks["newton_wigner_not_separating"]
        assert checks["standard_separating_on_sample"]
        assert checks["time_interval_rank_nondecreasing"]
        assert checks["dense_cyclic_vectors"]
        weyl = read_table(output, "weyl_convention")
        assert list(weyl["cutoff"]) == [2, 3]

    def test_standard_separation_sweep(self, small_config):
        output = run_experiment("cyclicity", small_config)
        sweep = read_table(output, "standard_separation")
        assert list(sweep.columns) == ["separation_sites", "separation", "rank", "dim"]
        assert list(sweep["separation_sites"]) == [1, 3, 40]
        assert list(sweep["separation"]) == pytest.approx([0.1, 0.3, 4.0])
        assert (sweep["dim"] == 16).all()
        assert list(sweep["rank"][:2]) == [16, 16]
        assert sweep["rank"].iloc[-1] < 16
        # the last sweep point is the configured geometry
        ranks = read_table(output, "ranks")
        std = ranks[ranks.scheme == "standard"].iloc[0]
        assert std["rank"] == sweep["rank"].iloc[-1]

    def test_separating_witness(self, small_config):
        output = run_experiment("cyclicity", small_config)
        separating = read_table(output, "separating")
        nw = separating[separating.scheme == "newton-wigner"].iloc[0]
        assert nw.defect == 0.0
        assert nw.witness.startswith("a(")


class TestMicrocausality:
    def test_newton_wigner_violates_standard_does_not(self, small_config):
        output = run_experiment("microcausality", small_config)
        defects = read_table(output, "defects")
        assert len(defects) == 2 * 5
        assert output.report_data["checks"] == {
            "newton_wigner_violates": True,
            "standard_tails_small": True,
            "weak_microcausality_exact": True,
        }


class TestCompareSchemes:
    def test_verdicts(self, small_config):
        output = run_experiment("compare-schemes", small_config)
        verdicts = read_table(output, "verdicts").set_index("scheme")
        assert not verdicts.loc["standard", "fundamentality_verdict"]
        assert not verdicts.loc["newton-wigner", "fundamentality_verdict"]
        assert verdicts.loc["standard", "reasons"] == "no local number operator"
        assert verdicts.loc["newton-wigner", "reasons"] == "strong microcausality defect"
        assert all(output.report_data["checks"].values())


class TestCorrelation:
    def test_lengths(self, small_config):
        output = run_experiment("correlation", small_config)
        lengths = read_table(output, "lengths")
        row = lengths.iloc[0]
        assert 0.8 <= row.fitted_length <= 1.2
        assert row.doubled_n_sites == 1024
        assert 0.6 <= row.effective_length <= 1.4
        assert all(output.report_data["checks"].values())


class TestOutputAndCache:
    def test_write_creates_named_files(self, small_config, tmp_path):
        output = run_experiment("microcausality", small_config)
        paths = output.write(tmp_path / "out")
        names = sorted(p.name for p in paths)
        assert names == ["microcausality.json", "microcausality_defects.csv", "microcausality_summary.csv"]
        text = (tmp_path / "out" / "microcausality.json").read_bytes()
        assert b"\r\n" not in text
        assert json.loads(text)["seed"] == small_config.seed

    def test_cache_hit_is_byte_identical(self, small_config, isolated_settings):
        isolated_settings.set("CACHE_ENABLED", True)
        fresh = run_experiment("antilocality", small_config)
        cached = run_experiment("antilocality", small_config)
        assert not fresh.from_cache
        assert cached.from_cache
        assert cached.tables == fresh.tables
        assert cached.report == fresh.report
        forced = run_experiment("antilocality", small_config, ignore_cache=True)
        assert not forced.from_cache

    def test_seed_changes_cache_key(self, small_config, isolated_settings):
        isolated_settings.set("CACHE_ENABLED", True)
        run_experiment("antilocality", small_config)
        other = run_experiment("antilocality", small_config.with_overrides(seed=small_config.seed + 1))
        assert not other.from_cache

    def test_physics_errors_are_wrapped(self, small_config, mocker):
        from qft_locality.utils.exceptions import FitError

        mocker.patch("qft_locality.core.experiments.decay_fit", side_effect=FitError("kernel", "no points"))
        with pytest.raises(ExperimentError) as excinfo:
            run_experiment("antilocality", small_config)
        assert "kernel" in str(excinfo.value)


def test_failed_checks_listed():
    report = report_to_json({"checks": {"a": True, "b": False}})
    assert ExperimentOutput("x", {}, report).failed_checks() == ["b"]


def test_custom_experiment_subclass(small_config):
    class Dummy(BaseExperiment):
        name = "vacuum"

        def do_run(self):
            return ExperimentResult({"t": pd.DataFrame({"v": [1.0]})}, {"value": 1}, {"ok": True})

    output = Dummy(small_config).run()
    assert output.tables == {"t": "v\n1\n"}
    assert output.report_data["checks"] == {"ok": True}
