"""Shared fixtures: small, fast planner configurations."""
import pytest

from dersizer.config import build_planner_config, load_config


def desk_config_dict(**overrides):
    """Weekly-horizon configuration small enough for unit tests."""
    base = {
        "horizon": {"hours": 168},
        "reliability": {"trials": 150},
        "pso": {"swarm_size": 10, "max_iterations": 25,
                "stagnation_patience": 6},
        "planner": {"largest_genset_step_kw": 1000.0},
        "seed": 42,
    }
    for section, entries in overrides.items():
        if isinstance(entries, dict):
            base.setdefault(section, {}).update(entries)
        else:
            base[section] = entries
    return base


@pytest.fixture
def desk_planner_config():
    cfg = load_config(overrides=desk_config_dict())
    return build_planner_config(cfg)


def make_planner_config(**overrides):
    cfg = load_config(overrides=desk_config_dict(**overrides))
    return build_planner_config(cfg)
