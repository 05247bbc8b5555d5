"""
Tests for the dyadic Calderon-Zygmund decomposition and its invariant checks.
"""
import logging

import numpy as np
import pytest

from newton_maximal.cz import cz_decompose, cz_verify
from newton_maximal.errors import GridError
from newton_maximal.grid import GridFunction, GridSpec
from tests.helpers.oracles import stopping_cubes


@pytest.fixture
def wide_grid():
    return GridSpec(-16.0, 16.0, 4)


def _random_steps(seed, grid):
    rng = np.random.default_rng(seed)
    steps = []
    for left in rng.uniform(-3.0, 3.0, size=5):
        steps.append((float(left), float(left + rng.uniform(0.05, 0.8)), float(rng.uniform(0.1, 6.0))))
    return grid.steps(steps)


class TestDecompose:
    def test_two_separated_bumps(self, wide_grid):
        f = wide_grid.steps([(0.0, 0.25, 4.0), (10.0, 10.25, 4.0)])
        result = cz_decompose(f, 0.5)
        assert (result.root.left, result.root.right) == (-16.0, 16.0)
        assert [(c.left, c.right) for c in result.cubes] == [(0.0, 1.0), (10.0, 11.0)]
        assert result.averages == (1.0, 1.0)
        assert result.omega_measure == 2.0
        assert not cz_verify(result, f).has_errors()

    def test_amplification_raises_threshold(self, wide_grid):
        f = wide_grid.steps([(0.0, 0.25, 4.0), (10.0, 10.25, 4.0)])
        result = cz_decompose(f, 0.25, amplification=1.0)
        assert result.threshold == 0.5
        assert len(result.cubes) == 2

    def test_zero_function(self, wide_grid):
        f = wide_grid.zeros()
        result = cz_decompose(f, 1.0)
        assert result.root is None
        assert result.cubes == ()
        assert not cz_verify(result, f).has_errors()

    @pytest.mark.parametrize("seed", range(6))
    @pytest.mark.parametrize("level", [0.05, 0.4, 2.0])
    def test_matches_top_down_walk(self, wide_grid, seed, level):
        f = _random_steps(seed, wide_grid)
        result = cz_decompose(f, level)
        expected = stopping_cubes(f.values, result.root.first_cell, result.root.stop_cell, level)
        assert [(c.first_cell, c.stop_cell) for c in result.cubes] == expected

    @pytest.mark.parametrize("seed", range(6))
    @pytest.mark.parametrize("level,amplification", [(0.05, 0.0), (0.4, 0.0), (0.4, 2.0), (3.0, 0.0)])
    def test_invariants_hold(self, wide_grid, seed, level, amplification):
        f = _random_steps(seed, wide_grid)
        result = cz_decompose(f, level, amplification)
        report = cz_verify(result, f)
        assert not report.violations
        (measured,) = report.measurements["cz"].values()
        assert measured["energy_ratio"] <= 1.0
        assert result.omega_measure <= f.mass / result.threshold + 1e-9

    def test_good_plus_bad_is_f(self, wide_grid):
        f = _random_steps(11, wide_grid)
        result = cz_decompose(f, 0.3)
        assert np.allclose(result.good.values + result.bad, f.values)
        assert np.all(result.bad[~result.in_omega] == 0)

    def test_to_dict(self, wide_grid):
        f = wide_grid.steps([(0.0, 0.25, 4.0)])
        dump = cz_decompose(f, 0.5).to_dict()
        assert dump["cubes"] == [[0.0, 1.0]]
        assert dump["root"] == [-1.0, 1.0]


class TestRoot:
    def test_root_doubles_until_average_is_small(self, caplog):
        f = GridSpec(-8.0, 8.0, 4).steps([(0.0, 1.0, 1.0)])
        with caplog.at_level(logging.WARNING, logger="newton_maximal.cz"):
            result = cz_decompose(f, 0.1)
        assert (result.root.left, result.root.right) == (-8.0, 8.0)
        assert caplog.text.count("enlarging root") == 3

    def test_root_outside_grid(self):
        f = GridSpec(-8.0, 8.0, 4).steps([(0.0, 1.0, 1.0)])
        with pytest.raises(GridError, match="not contained"):
            cz_decompose(f, 0.05)

    def test_grid_not_centered(self):
        f = GridSpec(0.0, 4.0, 4).steps([(1.0, 2.0, 1.0)])
        with pytest.raises(GridError):
            cz_decompose(f, 0.1)

    def test_unaligned_grid(self):
        with pytest.raises(GridError, match="aligned"):
            cz_decompose(GridFunction(0.1, 0.25, np.ones(8)), 1.0)


class TestArguments:
    @pytest.mark.parametrize("level", [0.0, -1.0, float("nan")])
    def test_level_must_be_positive(self, wide_grid, level):
        with pytest.raises(ValueError):
            cz_decompose(wide_grid.zeros(), level)

    def test_amplification_nonnegative(self, wide_grid):
        with pytest.raises(ValueError):
            cz_decompose(wide_grid.zeros(), 1.0, amplification=-1.0)
