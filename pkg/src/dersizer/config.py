"""Declarative run configuration: defaults, YAML overlay, validation.

The built-in defaults describe the reference community microgrid (4 MW peak
load, 3 MW PV, 1 MW wind, 0.5 MW biomass genset, 20-year lifetimes at a 5%
discount rate). A user file only has to state what differs; unknown keys are
rejected with the offending field path so typos surface immediately.
"""
from __future__ import annotations

import copy
import math
from typing import Any

import numpy as np
import yaml

from .cost_model import DEFAULT_QFD_MATRIX, CostParameters, QfdMatrix
from .planner import PlannerConfig, ReliabilitySettings
from .pso import PsoConfig
from .sizing import BessParameters
from .stochastic_models import (LoadModel, PvVariability, RenewableModel,
                                WindVariability, clear_sky_shape,
                                community_load_shape, read_series_csv,
                                steady_wind_shape)


class ConfigError(ValueError):
    """Invalid or unknown configuration entry; message names the field."""


DEFAULT_CONFIG: dict[str, Any] = {
    "seed": 42,
    "horizon": {
        "hours": 8760,
        "sample_interval_hours": 1.0,
    },
    "system": {
        "peak_load_kw": 4000.0,
        "pv_kw": 3000.0,
        "wt_kw": 1000.0,
        "biomass_kw": 500.0,
    },
    "load": {
        "noise_std_fraction": 0.05,
        "profile_csv": None,
    },
    "pv": {
        "cloud_alpha": 2.8,
        "cloud_beta": 1.35,
        "profile_csv": None,
    },
    "wind": {
        "weibull_scale_ms": 7.5,
        "weibull_shape": 2.0,
        "cut_in_ms": 3.0,
        "rated_ms": 12.0,
        "cut_out_ms": 25.0,
        "profile_csv": None,
    },
    # Planning convention: unit conversion efficiency. Any eta < 1 turns a
    # year of converter losses into a linear drift of the cumulative
    # stored-energy trajectory, swamping the swing that sets the kWh rating.
    "bess": {
        "conversion_efficiency": 1.0,
        "soc_max": 0.9,
        "soc_min": 0.1,
    },
    "costs": {
        "pv": {
            "overnight_capital_cost": 1800.0,
            "fixed_om_cost": 18.0,
            "variable_om_cost": 0.0,
            "ptc_rate": 0.023,
            "is_renewable": True,
        },
        "wt": {
            "overnight_capital_cost": 1700.0,
            "fixed_om_cost": 40.0,
            "variable_om_cost": 0.0,
            "ptc_rate": 0.023,
            "is_renewable": True,
        },
        "biomass": {
            "overnight_capital_cost": 3000.0,
            "fixed_om_cost": 90.0,
            "variable_om_cost": 0.01,
            "fuel_price": 2.2,
            "heat_rate": 0.0145,
            "leveling_factor": 1.0,
            "is_fuel_powered": True,
        },
        "natural_gas": {
            "overnight_capital_cost": 1100.0,
            "fixed_om_cost": 15.0,
            "variable_om_cost": 0.008,
            "fuel_price": 2.6,
            "heat_rate": 0.0103,
            "leveling_factor": 1.0,
            "is_fuel_powered": True,
        },
        "bess": {
            "overnight_capital_cost": 450.0,
            "energy_capital_cost": 600.0,
            "fixed_om_cost": 8.0,
            "variable_om_cost": 0.01,
        },
    },
    "cost_defaults": {
        "discount_rate": 0.05,
        "lifetime_years": 20,
    },
    "reliability": {
        "trials": 1000,
        "epoch_hours": 168.0,
        "customers": 1000,
        "biomass_forced_outage_rate": 0.05,
        "ng_forced_outage_rate": 0.05,
        "bess_forced_outage_rate": 0.02,
        "bess_firm_capacity": True,
        "prm_max": 1.0,
        "prm_resolution": 0.01,
        "plg_quantum": 0.01,
    },
    "planner": {
        "counted_renewable_fraction": 0.8,
        "lole_threshold_days_per_year": 0.1,
        "largest_genset_step_kw": 500.0,
        "threads": 1,
    },
    "pso": {
        "swarm_size": 30,
        "max_iterations": 100,
        "inertia_weight": 0.729,
        "cognitive_coeff": 1.49445,
        "social_coeff": 1.49445,
        "velocity_clamp": 0.5,
        "stagnation_tolerance": 1e-8,
        "stagnation_patience": 20,
    },
    "sweep": {
        "fractions": [0.0, 0.2, 0.5, 0.8, 0.9, 1.0],
    },
    "reliability_curve": {
        "prm_grid": [0.0, 0.1, 0.2, 0.3, 0.4],
        "plg_targets": [0.2, 0.5, 1.0],
    },
    "lcoe": {
        "rated_power_kw": 1000.0,
        "cf_grid": [round(0.05 * i, 2) for i in range(1, 21)],
    },
    "qfd": None,
}


def _merge(defaults: Any, override: Any, path: str) -> Any:
    if override is None:
        return copy.deepcopy(defaults)
    if isinstance(defaults, dict):
        if not isinstance(override, dict):
            raise ConfigError(f"field '{path}' must be a mapping")
        merged = {}
        for key, default_value in defaults.items():
            child = f"{path}.{key}" if path else key
            if key in override:
                merged[key] = _merge(default_value, override[key], child)
            else:
                merged[key] = copy.deepcopy(default_value)
        unknown = set(override) - set(defaults)
        if unknown:
            field = sorted(unknown)[0]
            where = f"{path}.{field}" if path else field
            raise ConfigError(f"unknown field '{where}'")
        return merged
    return copy.deepcopy(override)


def load_config(path: str | None = None,
                overrides: dict | None = None) -> dict[str, Any]:
    """Defaults overlaid with an optional YAML file and in-process overrides."""
    merged = copy.deepcopy(DEFAULT_CONFIG)
    if path is not None:
        with open(path) as fh:
            data = yaml.safe_load(fh)
        if data is None:
            data = {}
        if not isinstance(data, dict):
            raise ConfigError("config file must contain a mapping at top level")
        # The qfd section has open-ended structure; merge it wholesale.
        qfd_override = data.pop("qfd", None)
        merged = _merge(merged, data, "")
        if qfd_override is not None:
            merged["qfd"] = qfd_override
    if overrides:
        merged = _merge(merged, overrides, "")
    _validate(merged)
    return merged


def _require(condition: bool, field: str, message: str) -> None:
    if not condition:
        raise ConfigError(f"field '{field}' {message}")


def _validate(cfg: dict[str, Any]) -> None:
    _require(int(cfg["horizon"]["hours"]) >= 24, "horizon.hours",
             "must be at least 24")
    _require(cfg["horizon"]["sample_interval_hours"] > 0,
             "horizon.sample_interval_hours", "must be positive")
    for key in ("peak_load_kw",):
        _require(cfg["system"][key] > 0, f"system.{key}", "must be positive")
    for key in ("pv_kw", "wt_kw", "biomass_kw"):
        _require(cfg["system"][key] >= 0, f"system.{key}",
                 "must be non-negative")
    _require(0 <= cfg["load"]["noise_std_fraction"] <= 0.5,
             "load.noise_std_fraction", "must be in [0, 0.5]")
    _require(cfg["reliability"]["trials"] >= 1, "reliability.trials",
             "must be at least 1")
    _require(cfg["planner"]["lole_threshold_days_per_year"] > 0,
             "planner.lole_threshold_days_per_year", "must be positive")
    _require(0 <= cfg["planner"]["counted_renewable_fraction"] <= 1,
             "planner.counted_renewable_fraction", "must be in [0, 1]")
    _require(cfg["planner"]["largest_genset_step_kw"] > 0,
             "planner.largest_genset_step_kw", "must be positive")
    fractions = cfg["sweep"]["fractions"]
    _require(len(fractions) >= 1, "sweep.fractions", "must not be empty")
    _require(all(0 <= f <= 1 for f in fractions), "sweep.fractions",
             "entries must be in [0, 1]")
    _require(all(b >= a for a, b in zip(fractions, fractions[1:])),
             "sweep.fractions", "must be ascending")
    for key in ("cf_grid",):
        grid = cfg["lcoe"][key]
        _require(len(grid) >= 1, f"lcoe.{key}", "must not be empty")
        _require(all(0 < v <= 1 for v in grid), f"lcoe.{key}",
                 "entries must be in (0, 1]")


def build_cost_catalog(cfg: dict[str, Any]) -> dict[str, CostParameters]:
    shared = cfg["cost_defaults"]
    catalog = {}
    for tech, entry in cfg["costs"].items():
        params = dict(entry)
        params.setdefault("discount_rate", shared["discount_rate"])
        params.setdefault("lifetime_years", shared["lifetime_years"])
        try:
            catalog[tech] = CostParameters(**params)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"field 'costs.{tech}': {exc}") from None
    return catalog


def _horizon_samples(cfg: dict[str, Any]) -> tuple[int, float]:
    interval = float(cfg["horizon"]["sample_interval_hours"])
    n = int(round(cfg["horizon"]["hours"] / interval))
    return n, interval


def build_load_model(cfg: dict[str, Any]) -> LoadModel:
    n, interval = _horizon_samples(cfg)
    noise = float(cfg["load"]["noise_std_fraction"])
    csv_path = cfg["load"]["profile_csv"]
    if csv_path:
        series = read_series_csv(csv_path)
        if not math.isclose(series.sample_interval_hours, interval,
                            rel_tol=1e-9):
            raise ConfigError("field 'load.profile_csv' sampling interval "
                              "does not match horizon.sample_interval_hours")
        base = series.samples
        peak = float(base.max())
    else:
        base = community_load_shape(n, interval)
        peak = float(cfg["system"]["peak_load_kw"])
        base = base * peak
    return LoadModel(base_profile=base, peak_load_kw=peak,
                     noise_std_fraction=noise,
                     rng_seed=int(cfg["seed"]),
                     sample_interval_hours=interval)


def build_renewable_models(cfg: dict[str, Any]) -> list[RenewableModel]:
    n, interval = _horizon_samples(cfg)
    models = []
    pv_kw = float(cfg["system"]["pv_kw"])
    if pv_kw > 0:
        csv_path = cfg["pv"]["profile_csv"]
        if csv_path:
            series = read_series_csv(csv_path)
            shape = np.clip(series.samples / pv_kw, 0.0, 1.0)
            variability = None
        else:
            shape = clear_sky_shape(n, interval)
            variability = PvVariability(alpha=float(cfg["pv"]["cloud_alpha"]),
                                        beta=float(cfg["pv"]["cloud_beta"]))
        models.append(RenewableModel("pv", pv_kw, shape, variability,
                                     rng_seed=int(cfg["seed"]) + 1,
                                     sample_interval_hours=interval))
    wt_kw = float(cfg["system"]["wt_kw"])
    if wt_kw > 0:
        csv_path = cfg["wind"]["profile_csv"]
        if csv_path:
            series = read_series_csv(csv_path)
            shape = np.clip(series.samples / wt_kw, 0.0, 1.0)
            variability = None
        else:
            shape = steady_wind_shape(n, interval)
            wind = cfg["wind"]
            variability = WindVariability(
                weibull_scale_ms=float(wind["weibull_scale_ms"]),
                weibull_shape=float(wind["weibull_shape"]),
                cut_in_ms=float(wind["cut_in_ms"]),
                rated_ms=float(wind["rated_ms"]),
                cut_out_ms=float(wind["cut_out_ms"]))
        models.append(RenewableModel("wt", wt_kw, shape, variability,
                                     rng_seed=int(cfg["seed"]) + 2,
                                     sample_interval_hours=interval))
    return models


def build_reliability_settings(cfg: dict[str, Any]) -> ReliabilitySettings:
    rel = cfg["reliability"]
    return ReliabilitySettings(
        trials=int(rel["trials"]),
        epoch_hours=float(rel["epoch_hours"]),
        customers=int(rel["customers"]),
        biomass_forced_outage_rate=float(rel["biomass_forced_outage_rate"]),
        ng_forced_outage_rate=float(rel["ng_forced_outage_rate"]),
        bess_forced_outage_rate=float(rel["bess_forced_outage_rate"]),
        bess_firm_capacity=bool(rel["bess_firm_capacity"]),
        prm_max=float(rel["prm_max"]),
        prm_resolution=float(rel["prm_resolution"]),
        plg_quantum=float(rel["plg_quantum"]))


def build_pso_config(cfg: dict[str, Any]) -> PsoConfig:
    pso = cfg["pso"]
    return PsoConfig(bounds=((0.0, 1.0),),
                     swarm_size=int(pso["swarm_size"]),
                     max_iterations=int(pso["max_iterations"]),
                     inertia_weight=float(pso["inertia_weight"]),
                     cognitive_coeff=float(pso["cognitive_coeff"]),
                     social_coeff=float(pso["social_coeff"]),
                     velocity_clamp=float(pso["velocity_clamp"]),
                     stagnation_tolerance=float(pso["stagnation_tolerance"]),
                     stagnation_patience=int(pso["stagnation_patience"]))


def build_planner_config(cfg: dict[str, Any]) -> PlannerConfig:
    n, _ = _horizon_samples(cfg)
    try:
        return PlannerConfig(
            load_model=build_load_model(cfg),
            renewable_models=build_renewable_models(cfg),
            counted_renewable_fraction=float(
                cfg["planner"]["counted_renewable_fraction"]),
            biomass_kw=float(cfg["system"]["biomass_kw"]),
            cost_catalog=build_cost_catalog(cfg),
            lole_threshold_days_per_year=float(
                cfg["planner"]["lole_threshold_days_per_year"]),
            largest_genset_step_kw=float(
                cfg["planner"]["largest_genset_step_kw"]),
            bess_params=BessParameters(
                conversion_efficiency=float(cfg["bess"]["conversion_efficiency"]),
                soc_max=float(cfg["bess"]["soc_max"]),
                soc_min=float(cfg["bess"]["soc_min"])),
            pso=build_pso_config(cfg),
            reliability=build_reliability_settings(cfg),
            rng_seed=int(cfg["seed"]),
            horizon=n)
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def build_qfd_matrix(cfg: dict[str, Any]) -> QfdMatrix:
    entry = cfg.get("qfd")
    if entry is None:
        return DEFAULT_QFD_MATRIX
    try:
        return QfdMatrix(
            criteria=tuple((str(name), float(weight))
                           for name, weight in entry["criteria"]),
            technologies=tuple(str(t) for t in entry["technologies"]),
            scores=tuple(tuple(int(v) for v in row)
                         for row in entry["scores"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"field 'qfd': {exc}") from None


def dump_effective_config(cfg: dict[str, Any], path) -> None:
    with open(path, "w") as fh:
        yaml.safe_dump(cfg, fh, sort_keys=True, default_flow_style=False)
