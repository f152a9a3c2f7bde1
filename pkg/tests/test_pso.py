"""Swarm optimizer: convergence, determinism, bounds discipline."""
import numpy as np
import pytest

from dersizer.pso import PsoConfig, optimize, write_trace_csv


def sphere(x):
    return float(np.sum(x ** 2))


class TestOptimize:
    def test_sphere_1d(self):
        config = PsoConfig(bounds=((-5.0, 5.0),), rng_seed=1)
        result = optimize(sphere, config)
        assert result.best_objective < 1e-6
        assert abs(result.best_position[0]) < 1e-3

    def test_sphere_3d(self):
        config = PsoConfig(bounds=((-5.0, 5.0),) * 3, rng_seed=2)
        result = optimize(sphere, config)
        assert result.best_objective < 1e-4

    def test_constant_objective(self):
        config = PsoConfig(bounds=((-1.0, 1.0),), rng_seed=3)
        result = optimize(lambda x: 42.0, config)
        assert result.best_objective == 42.0
        assert -1.0 <= result.best_position[0] <= 1.0

    def test_minimum_at_bound_vs_grid_oracle(self):
        objective = lambda x: float(abs(x[0] - 5.0))
        config = PsoConfig(bounds=((-5.0, 5.0),), rng_seed=4)
        result = optimize(objective, config)
        grid = np.linspace(-5.0, 5.0, 10_000)
        oracle = min(abs(g - 5.0) for g in grid)
        assert result.best_objective <= oracle + 1e-3
        assert abs(result.best_position[0] - 5.0) < 1e-3

    def test_trace_monotone_non_increasing(self):
        rugged = lambda x: float(np.sin(5 * x[0]) + 0.1 * x[0] ** 2)
        config = PsoConfig(bounds=((-10.0, 10.0),), rng_seed=5)
        result = optimize(rugged, config)
        trace = result.convergence_trace
        assert all(b <= a for a, b in zip(trace, trace[1:]))

    def test_positions_stay_in_bounds(self):
        seen = []

        def spy(x):
            seen.append(x.copy())
            return sphere(x)

        config = PsoConfig(bounds=((2.0, 3.0), (-1.0, 0.5)), rng_seed=6,
                           max_iterations=40)
        result = optimize(spy, config)
        stacked = np.vstack(seen)
        assert np.all(stacked[:, 0] >= 2.0) and np.all(stacked[:, 0] <= 3.0)
        assert np.all(stacked[:, 1] >= -1.0) and np.all(stacked[:, 1] <= 0.5)
        assert 2.0 <= result.best_position[0] <= 3.0

    def test_deterministic_given_seed(self):
        config = PsoConfig(bounds=((-5.0, 5.0),), rng_seed=7)
        a = optimize(sphere, config)
        b = optimize(sphere, config)
        assert a.best_objective == b.best_objective
        assert np.array_equal(a.best_position, b.best_position)
        assert a.convergence_trace == b.convergence_trace

    def test_stagnation_stops_early(self):
        config = PsoConfig(bounds=((-1.0, 1.0),), rng_seed=8,
                           max_iterations=500, stagnation_patience=5)
        result = optimize(lambda x: 1.0, config)
        assert result.iterations_run == 5


class TestPsoConfigValidation:
    def test_bad_bounds(self):
        with pytest.raises(ValueError):
            PsoConfig(bounds=((1.0, 1.0),))

    def test_small_swarm(self):
        with pytest.raises(ValueError):
            PsoConfig(bounds=((0.0, 1.0),), swarm_size=1)

    def test_negative_coefficient(self):
        with pytest.raises(ValueError):
            PsoConfig(bounds=((0.0, 1.0),), inertia_weight=-0.1)

    def test_empty_bounds(self):
        with pytest.raises(ValueError):
            PsoConfig(bounds=())


class TestTraceCsv:
    def test_write(self, tmp_path):
        path = tmp_path / "trace.csv"
        write_trace_csv(path, [3.0, 2.0, 2.0])
        lines = path.read_text().strip().splitlines()
        assert lines[0] == "iteration,best_objective"
        assert len(lines) == 4
