"""
Tests for grid functions, quadrature rules, the eta window and pushforward sums.
"""
import numpy as np
import pytest

from newton_maximal.errors import GridError
from newton_maximal.grid import (
    ETA_HI,
    ETA_LO,
    EtaWindow,
    GridFunction,
    GridSpec,
    eta,
    midpoint_rule,
    pushforward_average,
    tensor_rule,
)
from newton_maximal.polynomial import parse_polynomial
from tests.helpers.oracles import direct_average


class TestGridFunction:
    def test_indicator_mass_is_exact(self, small_grid):
        f = small_grid.steps([(0.0, 1.0, 1.0)])
        assert f.mass == 1.0
        assert f.values.sum() * f.dx == pytest.approx(1.0, abs=1e-12)

    def test_partial_cells_use_cell_averages(self):
        f = GridFunction.from_steps([(0.25, 1.0, 2.0)], 0.0, 2.0, 0.5)
        assert list(f.values) == [1.0, 2.0, 0.0, 0.0]
        assert f.mass == 1.5

    def test_negative_samples_rejected(self):
        with pytest.raises(GridError, match="negative"):
            GridFunction(0.0, 1.0, np.array([1.0, -0.5]))

    def test_bad_step_rejected(self):
        with pytest.raises(GridError):
            GridFunction(0.0, 0.0, np.ones(4))
        with pytest.raises(GridError):
            GridFunction.from_steps([(1.0, 0.0, 1.0)], 0.0, 2.0, 0.5)

    def test_inconsistent_exact_mass(self):
        with pytest.raises(GridError, match="exact mass"):
            GridFunction(0.0, 0.5, np.ones(4), exact_mass=3.0)

    def test_values_are_read_only(self, small_grid):
        f = small_grid.zeros()
        with pytest.raises(ValueError):
            f.values[0] = 1.0

    def test_dyadic_alignment(self, small_grid):
        assert small_grid.zeros().is_dyadic_aligned
        assert not GridFunction(0.1, 0.25, np.ones(4)).is_dyadic_aligned
        assert not GridFunction(0.0, 0.3, np.ones(4)).is_dyadic_aligned

    def test_support_and_translation(self, small_grid):
        f = small_grid.steps([(0.0, 1.0, 1.0)])
        first, stop = f.support_cells()
        moved = f.translated(5)
        assert moved.support_cells() == (first + 5, stop + 5)
        assert moved.mass == f.mass
        with pytest.raises(GridError):
            f.translated(10 ** 6)

    def test_sample_interpolates_and_vanishes_outside(self):
        f = GridFunction(0.0, 1.0, np.array([0.0, 2.0, 4.0]))
        assert f.sample([1.0, 2.0, 2.5, 3.5, -1.0]) == pytest.approx([1.0, 3.0, 4.0, 0.0, 0.0])

    def test_grid_spec(self):
        spec = GridSpec(-4.0, 4.0, 7)
        assert spec.dx == 2.0 ** -7
        assert spec.size == 1024
        assert spec.zeros().x_hi == 4.0


class TestQuadrature:
    def test_midpoint_rule(self):
        nodes, weights = midpoint_rule(0.0, 2.0, 4)
        assert list(nodes) == [0.25, 0.75, 1.25, 1.75]
        assert weights.sum() == pytest.approx(2.0)

    def test_tensor_rule_integrates_product(self):
        a, wa = midpoint_rule(0.0, 1.0, 64)
        b, wb = midpoint_rule(0.0, 2.0, 64)
        points, weights = tensor_rule([a, b], [wa, wb])
        assert points.shape == (64 * 64, 2)
        assert float(np.sum(weights * points[:, 0] * points[:, 1])) == pytest.approx(1.0, rel=1e-3)


class TestEta:
    def test_support_and_plateau(self):
        s = np.array([0.25, 0.5, 1.0, 1.5, 2.0, 4.0, 5.0])
        assert list(eta(s)) == [0.0, 0.0, 1.0, 1.0, 1.0, 0.0, 0.0]

    def test_range_and_smoothness(self):
        s = np.linspace(ETA_LO, ETA_HI, 2001)
        values = eta(s)
        assert np.all((values >= 0) & (values <= 1))
        assert np.max(np.abs(np.diff(values))) < 0.02

    def test_window_integral(self):
        window = EtaWindow(64)
        nodes, weights = window.rule()
        assert nodes.min() > ETA_LO and nodes.max() < ETA_HI
        assert window.integral == pytest.approx(float(np.sum(weights)))
        assert 1.0 < window.integral < ETA_HI - ETA_LO

    def test_tensor_weights_factor(self):
        window = EtaWindow(16)
        _, weights = window.tensor(2)
        assert float(weights.sum()) == pytest.approx(window.integral ** 2)


class TestPushforward:
    def test_matches_direct_interpolation(self, small_grid):
        f = small_grid.steps([(-1.0, 0.5, 1.0), (1.0, 1.25, 3.0)])
        p = parse_polynomial("t1^2 - 0.3*t1", 1)
        rng = np.random.default_rng(1)
        points = rng.uniform(0.0, 2.0, size=(37, 1))
        weights = rng.uniform(0.0, 1.0, size=37)
        fast = pushforward_average(f, p.evaluate(points), weights)
        assert np.allclose(fast, direct_average(f, p, points, weights), atol=1e-10)

    def test_lattice_shift_is_translation(self, small_grid):
        f = small_grid.steps([(0.0, 1.0, 1.0)])
        shifted = pushforward_average(f, np.array([16 * f.dx]), 1.0)
        assert np.allclose(shifted, f.translated(16).values, atol=1e-10)

    def test_unit_weights_preserve_constant(self, small_grid):
        f = small_grid.steps([(-3.0, 3.0, 2.0)])
        values = pushforward_average(f, np.array([0.1, 0.2, 0.3]), np.full(3, 1.0 / 3.0))
        middle = np.abs(f.midpoints) < 2.0
        assert np.allclose(values[middle], 2.0)
