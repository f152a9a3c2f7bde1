"""Configuration loading: defaults, overlays, diagnostics, CSV ingestion."""
import numpy as np
import pytest
import yaml

from dersizer.config import (ConfigError, build_cost_catalog, build_load_model,
                             build_planner_config, build_qfd_matrix,
                             build_renewable_models, load_config)
from dersizer.cost_model import qfd_score
from dersizer.stochastic_models import TimeSeries, write_series_csv


class TestLoadConfig:
    def test_defaults_validate(self):
        cfg = load_config()
        assert cfg["system"]["peak_load_kw"] == 4000.0
        assert cfg["planner"]["counted_renewable_fraction"] == 0.8

    def test_overlay_keeps_unrelated_defaults(self, tmp_path):
        path = tmp_path / "partial.yaml"
        path.write_text("system:\n  peak_load_kw: 2500.0\n")
        cfg = load_config(path)
        assert cfg["system"]["peak_load_kw"] == 2500.0
        assert cfg["system"]["pv_kw"] == 3000.0
        assert cfg["costs"]["bess"]["energy_capital_cost"] == 600.0

    def test_unknown_nested_field_named(self, tmp_path):
        path = tmp_path / "typo.yaml"
        path.write_text("reliability:\n  trails: 100\n")
        with pytest.raises(ConfigError, match="reliability.trails"):
            load_config(path)

    def test_unknown_top_level_field_named(self, tmp_path):
        path = tmp_path / "typo.yaml"
        path.write_text("relaibility:\n  trials: 100\n")
        with pytest.raises(ConfigError, match="relaibility"):
            load_config(path)

    def test_non_mapping_section_rejected(self, tmp_path):
        path = tmp_path / "bad.yaml"
        path.write_text("system: 4000\n")
        with pytest.raises(ConfigError, match="system"):
            load_config(path)

    def test_invalid_value_diagnostic(self):
        with pytest.raises(ConfigError, match="sweep.fractions"):
            load_config(overrides={"sweep": {"fractions": [0.5, 0.2]}})


class TestCostCatalog:
    def test_shared_defaults_applied(self):
        catalog = build_cost_catalog(load_config())
        for params in catalog.values():
            assert params.discount_rate == 0.05
            assert params.lifetime_years == 20

    def test_bad_entry_names_technology(self):
        cfg = load_config()
        cfg["costs"]["pv"]["overnight_capital_cost"] = -5.0
        with pytest.raises(ConfigError, match="costs.pv"):
            build_cost_catalog(cfg)


class TestCsvIngestion:
    def test_load_profile_drop_in(self, tmp_path):
        samples = 1000.0 + 500.0 * np.sin(np.linspace(0, 2 * np.pi, 24))
        path = tmp_path / "load.csv"
        write_series_csv(path, TimeSeries(samples, 1.0))
        cfg = load_config(overrides={
            "horizon": {"hours": 24},
            "load": {"profile_csv": str(path)}})
        model = build_load_model(cfg)
        assert np.allclose(model.base_profile, samples)
        assert model.peak_load_kw == pytest.approx(samples.max())

    def test_pv_profile_becomes_shape_without_synthetic_clouds(self, tmp_path):
        samples = np.concatenate([np.zeros(6), np.full(12, 2400.0),
                                  np.zeros(6)])
        path = tmp_path / "pv.csv"
        write_series_csv(path, TimeSeries(samples, 1.0))
        cfg = load_config(overrides={
            "horizon": {"hours": 24},
            "pv": {"profile_csv": str(path)}})
        models = build_renewable_models(cfg)
        pv = next(m for m in models if m.technology == "pv")
        assert pv.variability is None
        assert np.allclose(pv.shape, samples / 3000.0)

    def test_interval_mismatch_rejected(self, tmp_path):
        path = tmp_path / "load.csv"
        write_series_csv(path, TimeSeries(np.ones(24), 0.5))
        cfg = load_config(overrides={"load": {"profile_csv": str(path)}})
        with pytest.raises(ConfigError, match="load.profile_csv"):
            build_load_model(cfg)


class TestQfdOverride:
    def test_default_matrix(self):
        matrix = build_qfd_matrix(load_config())
        assert qfd_score(matrix)["Biomass Genset"] == 153

    def test_custom_matrix_from_file(self, tmp_path):
        path = tmp_path / "qfd.yaml"
        yaml.safe_dump({"qfd": {
            "criteria": [["cost", 5], ["noise", 2]],
            "technologies": ["diesel"],
            "scores": [[3, -1]],
        }}, path.open("w"))
        matrix = build_qfd_matrix(load_config(path))
        assert qfd_score(matrix) == {"diesel": 13.0}

    def test_malformed_matrix_diagnostic(self, tmp_path):
        path = tmp_path / "qfd.yaml"
        path.write_text("qfd:\n  criteria: [[a, 5]]\n")
        with pytest.raises(ConfigError, match="qfd"):
            build_qfd_matrix(load_config(path))


class TestPlannerConfigBuilder:
    def test_builds_with_defaults(self):
        config = build_planner_config(load_config(
            overrides={"horizon": {"hours": 168},
                       "reliability": {"trials": 20}}))
        assert config.biomass_kw == 500.0
        assert len(config.renewable_models) == 2
        assert config.horizon == 168

    def test_zero_renewables_yield_no_models(self):
        config = build_planner_config(load_config(
            overrides={"horizon": {"hours": 168},
                       "system": {"pv_kw": 0.0, "wt_kw": 0.0},
                       "reliability": {"trials": 20}}))
        assert config.renewable_models == []
