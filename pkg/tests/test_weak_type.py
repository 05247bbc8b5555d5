"""
Tests for the weak-type harness: corpus, distribution functions, W and sweeps.
"""
import numpy as np
import pytest

from newton_maximal.errors import GridError
from newton_maximal.grid import GridFunction, GridSpec
from newton_maximal.maximal import MaximalResult, maximal_continuous
from newton_maximal.polynomial import parse_polynomial
from newton_maximal.report import VerificationReport
from newton_maximal.weak_type import (
    FunctionKind,
    OperatorSettings,
    StabilityResult,
    SweepSettings,
    _delta_sweep,
    bump_sum,
    chebyshev_bound,
    default_corpus,
    delta_growth,
    delta_like,
    distribution_function,
    indicator_function,
    stability_sweep,
    weak_type_functional,
    weak_type_profile,
)


def _result(values, dx=0.5):
    values = np.asarray(values, dtype=float)
    x = np.arange(values.size) * dx
    return MaximalResult("test", x, values, np.zeros((values.size, 1)))


@pytest.fixture
def quick_settings():
    return SweepSettings(
        operator=OperatorSettings(kind="continuous", h_grid_size=4, q_max=4, order=8, eta_nodes=8),
        levels=(2, 3, 4),
        k_max=1,
        measure_nodes=8,
        bins_log2=7,
        alpha_points=32,
        delta_widths=(16, 8, 4),
        coefficient_scales=(0.5, 2.0),
        translations=(37,),
    )


class TestCorpus:
    def test_default_corpus(self, coarse_grid):
        corpus = default_corpus(coarse_grid, size=6, seed=2)
        assert len(corpus) == 6
        assert corpus[0].kind is FunctionKind.INDICATOR
        assert corpus[0].mass == 1.0
        assert corpus[1].kind is FunctionKind.DELTA_LIKE
        assert corpus[1].mass == pytest.approx(1.0)
        assert all(tf.kind is FunctionKind.BUMP_SUM for tf in corpus[2:])
        assert all(np.all(tf.function.values >= 0) and tf.mass > 0 for tf in corpus)

    def test_seed_is_reproducible(self, coarse_grid):
        first = [tf.function.values for tf in default_corpus(coarse_grid, size=5, seed=9)]
        second = [tf.function.values for tf in default_corpus(coarse_grid, size=5, seed=9)]
        assert all(np.array_equal(a, b) for a, b in zip(first, second))

    @pytest.mark.parametrize("dx_log2", [3, 5, 7])
    def test_bumps_fit_coarse_grids(self, dx_log2):
        grid = GridSpec(-4.0, 4.0, dx_log2)
        for seed in range(5):
            for tf in default_corpus(grid, size=20, seed=seed)[2:]:
                support = tf.function.midpoints[tf.function.values > 0]
                assert support.min() >= -2.0 and support.max() < 2.0

    def test_grid_too_narrow(self):
        with pytest.raises(GridError):
            default_corpus(GridSpec(-2.0, 2.0, 5))

    def test_size_positive(self, coarse_grid):
        with pytest.raises(ValueError):
            default_corpus(coarse_grid, size=0)

    def test_delta_narrower_than_grid(self, coarse_grid):
        with pytest.raises(GridError):
            delta_like(0.0, coarse_grid.dx / 2, coarse_grid)

    def test_zero_mass_rejected(self, coarse_grid):
        with pytest.raises(GridError):
            bump_sum([(0.0, 1.0, 0.0)], coarse_grid)

    def test_names(self, coarse_grid):
        assert indicator_function(0.0, 1.0, coarse_grid).name == "indicator(a=0.0,b=1.0)"


class TestDistribution:
    def test_counts_strictly_above(self):
        measures = distribution_function(_result([0.0, 1.0, 2.0, 3.0]), np.array([0.5, 1.0, 2.5]))
        assert list(measures) == [1.5, 1.0, 0.5]

    def test_raw_values_need_dx(self):
        with pytest.raises(ValueError):
            distribution_function(np.ones(4), np.array([0.5]))
        assert list(distribution_function(np.ones(4), np.array([0.5]), dx=0.25)) == [1.0]

    def test_alpha_grid_validated(self):
        with pytest.raises(ValueError):
            distribution_function(_result([1.0]), np.array([1.0, 0.5]))
        with pytest.raises(ValueError):
            distribution_function(_result([1.0]), np.array([0.0, 0.5]))


class TestFunctional:
    def test_linear_indicator_closed_form(self, small_grid):
        f = indicator_function(0.0, 1.0, small_grid).function
        result = maximal_continuous(f, parse_polynomial("t1", 1), 6)
        profile = weak_type_profile(result, f)
        assert profile.value == pytest.approx(1.0, abs=0.02)
        assert profile.maximizing_alpha == pytest.approx(1.0, abs=0.15)
        assert profile.value <= chebyshev_bound(result, f) * (1 + 1e-12)

    def test_zero_operator(self, coarse_grid):
        f = indicator_function(0.0, 1.0, coarse_grid).function
        profile = weak_type_profile(_result(np.zeros(8)), f)
        assert profile.value == 0.0
        assert profile.maximizing_alpha is None

    def test_massless_function(self):
        f = GridFunction(0.0, 0.5, np.zeros(8))
        with pytest.raises(ValueError):
            weak_type_profile(_result(np.ones(8)), f)

    def test_homogeneous_of_degree_zero(self, coarse_grid):
        f = coarse_grid.steps([(0.0, 1.0, 1.0), (2.0, 2.5, 3.0)])
        p = parse_polynomial("t1^2", 1)
        base = weak_type_functional(maximal_continuous(f, p, 4, order=8), f)
        scaled_f = f.scaled(1024.0)
        scaled = weak_type_functional(maximal_continuous(scaled_f, p, 4, order=8), scaled_f)
        assert scaled == base

    def test_unknown_operator(self):
        with pytest.raises(ValueError):
            OperatorSettings(kind="spherical")


class TestStabilitySweep:
    def test_single_monomial(self, coarse_grid, quick_settings):
        p = parse_polynomial("t1", 1)
        corpus = default_corpus(coarse_grid, size=3)
        report = VerificationReport()
        result = stability_sweep(p, corpus, quick_settings, report=report, suite="sweep")
        assert set(result.corpus) == {tf.name for tf in corpus}
        assert result.homogeneity_defect <= 1e-9
        assert set(result.translations) == {37}
        assert [w for w, _ in result.delta_curve] == [16 * coarse_grid.dx, 8 * coarse_grid.dx, 4 * coarse_grid.dx]
        assert set(result.coefficient_sweep) == {0.5, 2.0}
        assert result.level_fits[0].vanishing
        checks = {v.check for v in report.get_violations_by_suite("sweep")}
        assert not checks & {"chebyshev", "homogeneity"}
        assert report.get_violations_by_severity("info")
        assert report.measurements["sweep"][p.to_text()]["corpus_max_W"] == result.max_w

    def test_two_vertex_levels(self, coarse_grid, quick_settings, two_vertex_poly):
        corpus = default_corpus(coarse_grid, size=2)
        result = stability_sweep(two_vertex_poly, corpus, quick_settings)
        assert len(result.vertex) == 2
        assert len(result.levels) == 2 * 3 * 2
        rows = result.level_rows()
        assert [(row[0], row[1]) for row in rows] == [(str(j), str(n)) for j in range(2) for n in (2, 3, 4)]
        assert not result.axis

    def test_axis_pieces(self, coarse_grid, quick_settings, axis_poly):
        corpus = default_corpus(coarse_grid, size=2)
        result = stability_sweep(axis_poly, corpus, quick_settings)
        assert len(result.axis) == 2 * 2
        assert set(result.axis_fits) == {0, 1}

    def test_empty_corpus(self, quick_settings):
        with pytest.raises(ValueError):
            stability_sweep(parse_polynomial("t1", 1), [], quick_settings)


class TestDeltaGrowth:
    def test_flat_step_keeps_growth(self):
        assert delta_growth([(16.0, 1.0), (8.0, 1.0), (4.0, 3.0)]) == 3.0

    def test_width_order_does_not_matter(self):
        assert delta_growth([(4.0, 3.0), (16.0, 1.5), (8.0, 1.0)]) == 2.0

    def test_shrinking_curve(self):
        assert delta_growth([(16.0, 1.0), (8.0, 0.9), (4.0, 0.8)]) == pytest.approx(0.9)

    @pytest.mark.parametrize("curve", [[], [(16.0, 1.0)], [(16.0, 0.0), (8.0, 2.0)]])
    def test_degenerate_curves(self, curve):
        assert delta_growth(curve) == 0.0

    def test_sweep_flags_growth_behind_a_flat_step(self, coarse_grid):
        w_by_cells = {16: 1.0, 8: 1.0, 4: 3.0}
        report = VerificationReport()
        result = StabilityResult("t1")
        measure = lambda f: (w_by_cells[int(np.count_nonzero(f.values))],)
        _delta_sweep(None, SweepSettings(delta_widths=(16, 8, 4)), result, report, "sweep", coarse_grid.zeros(), measure)
        (violation,) = report.get_violations_by_suite("sweep")
        assert violation.check == "delta_blow_up"
        assert violation.actual == repr(3.0)

    def test_sweep_accepts_bounded_curve(self, coarse_grid):
        report = VerificationReport()
        measure = lambda f: (1.0 + 0.1 * (16 - np.count_nonzero(f.values)) / 16,)
        _delta_sweep(None, SweepSettings(delta_widths=(16, 8, 4)), StabilityResult("t1"), report, "sweep",
                     coarse_grid.zeros(), measure)
        assert not report.violations
