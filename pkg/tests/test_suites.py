"""
Tests for the suite runners and report emission.
"""
import csv
import json

import pytest

from newton_maximal.config import ExperimentConfig
from newton_maximal.report import VerificationReport
from newton_maximal.suites import MAXIMAL_PAIRS, PARTITION_CORPUS, emit_report, run_experiment


@pytest.fixture
def maximal_config(tmp_path):
    return ExperimentConfig(
        suite="maximal", x_min=-4.0, x_max=4.0, dx_log2=5, h_grid_size=4, quadrature_order=16,
        dyadic_qmax=4, eta_nodes=8, alpha_points=16, out=tmp_path,
    )


class TestMaximalSuite:
    def test_operator_comparisons_hold(self, maximal_config):
        report = run_experiment(maximal_config)
        checks = {v.check for v in report.get_violations_by_suite("maximal")}
        assert not checks & {"dyadic_vs_continuous", "continuous_vs_eta"}

    def test_random_pairs(self, maximal_config, tmp_path):
        report = run_experiment(maximal_config)
        pairs = {key: value for key, value in report.measurements["maximal"].items() if key.startswith("pair ")}
        assert len(pairs) == MAXIMAL_PAIRS
        assert all({"dyadic_excess", "eta_excess", "continuous_sup"} <= set(value) for value in pairs.values())
        planar = {text for text, n in PARTITION_CORPUS if n == 2}
        with open(tmp_path / "maximal_pairs.csv", newline="", encoding="utf-8") as handle:
            rows = list(csv.DictReader(handle))
        assert len(rows) == MAXIMAL_PAIRS
        assert {row["polynomial"] for row in rows} <= planar

    def test_pairs_follow_the_seed(self, maximal_config, tmp_path):
        first = run_experiment(maximal_config).measurements["maximal"]
        second = run_experiment(maximal_config.with_overrides(out=tmp_path / "again")).measurements["maximal"]
        assert first == second


class TestEmitReport:
    def test_writes_every_format(self, tmp_path):
        report = VerificationReport()
        report.add_suite("cz")
        report.add_violation("cz", "mean_zero", "error", "bad part does not integrate to zero")
        paths = emit_report(report, tmp_path)
        assert {path.name for path in paths} == {"report.json", "report.md", "report.txt", "index.json"}
        assert "[ERROR] MEAN_ZERO" in (tmp_path / "report.txt").read_text(encoding="utf-8")
        index = json.loads((tmp_path / "index.json").read_text(encoding="utf-8"))
        assert index["artifacts"] == ["index.json", "report.json", "report.md", "report.txt"]

    def test_requires_a_suite(self, tmp_path):
        with pytest.raises(ValueError):
            emit_report(VerificationReport(), tmp_path)
