import numpy as np
import pytest

from noisyqaoa.maxcut import BUILTIN_GRAPHS, fom_objective
from noisyqaoa.noise import DeviceModel, toggles_for_series
from noisyqaoa.optimize import (DEConfig, differential_evolution, grid_scan,
                                qaoa_bounds)


def sphere(x):
    return float((np.asarray(x) ** 2).sum())


class TestDifferentialEvolution:
    def test_sphere_minimum(self):
        res = differential_evolution(sphere, [(-5, 5)] * 3, DEConfig(seed=1))
        assert res.best_value <= 1e-6
        assert np.abs(res.best_params).max() < 1e-2

    def test_deterministic_reruns(self):
        cfg = DEConfig(seed=99, max_generations=40)
        a = differential_evolution(sphere, [(-5, 5)] * 4, cfg)
        b = differential_evolution(sphere, [(-5, 5)] * 4, cfg)
        assert a.best_value == b.best_value
        assert (a.best_params == b.best_params).all()
        assert (a.history == b.history).all()
        assert a.evaluations == b.evaluations

    def test_seeds_differ(self):
        a = differential_evolution(sphere, [(-5, 5)] * 4, DEConfig(seed=1, max_generations=5, polish=False))
        b = differential_evolution(sphere, [(-5, 5)] * 4, DEConfig(seed=2, max_generations=5, polish=False))
        assert a.best_value != b.best_value

    def test_history_monotone_nonincreasing(self):
        res = differential_evolution(sphere, [(-5, 5)] * 5, DEConfig(seed=3))
        assert (np.diff(res.history) <= 1e-15).all()

    def test_result_within_bounds(self, rng):
        bounds = [(-1.0, 2.0), (0.5, 0.75), (-3.0, -2.0)]

        def shifted(x):
            return sphere(x - 10.0)  # optimum far outside the box

        res = differential_evolution(shifted, bounds, DEConfig(seed=5))
        for val, (lo, hi) in zip(res.best_params, bounds):
            assert lo - 1e-12 <= val <= hi + 1e-12

    def test_x0_refinement_never_regresses(self):
        x0 = np.array([0.01, -0.02])
        cfg = DEConfig(seed=7, max_generations=3, polish=False)
        res = differential_evolution(sphere, [(-5, 5)] * 2, cfg, x0=x0)
        assert res.best_value <= sphere(x0)

    def test_evaluation_count(self):
        cfg = DEConfig(population=10, max_generations=5, tol=0.0, polish=False, seed=0)
        calls = []

        def counting(x):
            calls.append(1)
            return sphere(x)

        res = differential_evolution(counting, [(-1, 1)] * 2, cfg)
        assert res.evaluations == len(calls) == 10 * 6

    def test_polish_improves_or_matches(self):
        rough = DEConfig(seed=11, max_generations=10, polish=False)
        polished = DEConfig(seed=11, max_generations=10, polish=True)
        a = differential_evolution(sphere, [(-5, 5)] * 3, rough)
        b = differential_evolution(sphere, [(-5, 5)] * 3, polished)
        assert b.best_value <= a.best_value

    def test_default_population_rule(self):
        assert DEConfig().population_for(2) == 30
        assert DEConfig().population_for(1) == 20
        assert DEConfig(population=44).population_for(8) == 44

    def test_config_validation(self):
        with pytest.raises(ValueError):
            DEConfig(population=3)
        with pytest.raises(ValueError):
            DEConfig(crossover=1.5)
        with pytest.raises(ValueError):
            DEConfig(max_generations=0)
        with pytest.raises(ValueError):
            DEConfig(f_range=(0.0, 1.0))

    def test_bounds_validation(self):
        with pytest.raises(ValueError):
            differential_evolution(sphere, [(1.0, 1.0)], DEConfig())
        with pytest.raises(ValueError):
            differential_evolution(sphere, [], DEConfig())

    def test_two_node_qaoa_reaches_exact_solution(self):
        objective = fom_objective(BUILTIN_GRAPHS["2n-edge"], 1, DeviceModel(),
                                  toggles_for_series("PURE"))
        res = differential_evolution(objective, qaoa_bounds(1), DEConfig(seed=1))
        assert res.best_value <= 1e-3


class TestGridScan:
    def test_constant_objective_returns_first_point(self):
        res = grid_scan(lambda x: 1.0, [(0, 1), (0, 2)], resolution=4)
        np.testing.assert_array_equal(res.best_params, [0.0, 0.0])
        assert res.best_value == 1.0
        assert res.values.shape == (4, 4)
        assert (res.values == 1.0).all()

    def test_quadratic_minimum_on_grid(self):
        res = grid_scan(lambda x: float((x[0] - 0.5) ** 2), [(0, 1)], resolution=5)
        assert res.best_params[0] == 0.5
        assert res.best_value == 0.0

    def test_endpoints_inclusive(self):
        res = grid_scan(sphere, [(-2, 2)], resolution=3)
        np.testing.assert_array_equal(res.axes[0], [-2, 0, 2])

    def test_resolution_guard(self):
        with pytest.raises(ValueError):
            grid_scan(sphere, [(0, 1)], resolution=1)

    def test_dimension_guard(self):
        with pytest.raises(ValueError, match="dimensions"):
            grid_scan(sphere, [(0, 1)] * 5, resolution=2)

    def test_de_refines_grid_best(self):
        # seeding DE from the grid optimum can only improve on the whole grid
        objective = fom_objective(BUILTIN_GRAPHS["2n-edge"], 1, DeviceModel(),
                                  toggles_for_series("PURE"))
        grid = grid_scan(objective, qaoa_bounds(1), resolution=9)
        cfg = DEConfig(seed=2, max_generations=20)
        res = differential_evolution(objective, qaoa_bounds(1), cfg, x0=grid.best_params)
        assert res.best_value <= grid.values.min() + 1e-15

    def test_values_match_objective(self):
        res = grid_scan(sphere, [(0, 1), (0, 1)], resolution=3)
        for i, a in enumerate(res.axes[0]):
            for j, b in enumerate(res.axes[1]):
                assert res.values[i, j] == sphere(np.array([a, b]))


class TestQaoaBounds:
    def test_layout(self):
        bounds = qaoa_bounds(2)
        assert bounds == [(0.0, 2 * np.pi)] * 2 + [(0.0, np.pi)] * 2

    def test_rejects_zero_levels(self):
        with pytest.raises(ValueError):
            qaoa_bounds(0)
