"""
Pytest configuration and shared fixtures.
"""
import pytest
from pathlib import Path

from newton_maximal.diagram import build_diagram
from newton_maximal.grid import GridSpec
from newton_maximal.polynomial import parse_polynomial
from newton_maximal.report import VerificationReport


TESTS_DIR = Path(__file__).parent

# Session-wide report of measured constants
_report = None


def pytest_addoption(parser):
    """Add custom command-line options."""
    parser.addoption(
        "--report-format",
        action="store",
        default="markdown",
        choices=["markdown", "json", "text", "all"],
        help="Format for the measurement report (markdown, json, text, or all)"
    )
    parser.addoption(
        "--report-dir",
        action="store",
        default=None,
        help="Directory to save the measurement report; nothing is written when omitted"
    )


def pytest_configure(config):
    """Initialize the report before tests run."""
    global _report
    _report = VerificationReport()


def pytest_sessionfinish(session, exitstatus):
    """Write the measurement report after all tests complete."""
    global _report

    report_dir = session.config.getoption("--report-dir")
    if _report is None or report_dir is None or not _report.suites_run:
        return
    report_format = session.config.getoption("--report-format")
    report_dir = Path(report_dir)
    report_dir.mkdir(parents=True, exist_ok=True)

    if report_format in ["markdown", "all"]:
        _report.to_markdown(report_dir / "measurements.md")
    if report_format in ["json", "all"]:
        _report.to_json(report_dir / "measurements.json")
    if report_format in ["text", "all"]:
        _report.to_text(report_dir / "measurements.txt")

    summary = _report.generate_summary()
    print(f"\n{'='*60}")
    print("Measurement report:")
    print(f"  Suites: {summary['suites_run']}")
    print(f"  Violations: {summary['total_violations']} (errors: {summary['errors']})")
    print(f"{'='*60}\n")


@pytest.fixture
def measurement_report():
    """Provide access to the session report."""
    global _report
    return _report


@pytest.fixture
def small_grid():
    """[-4, 4) with spacing 2^-7."""
    return GridSpec(-4.0, 4.0, 7)


@pytest.fixture
def coarse_grid():
    """[-4, 4) with spacing 2^-5, for operators swept over many indices."""
    return GridSpec(-4.0, 4.0, 5)


@pytest.fixture
def two_vertex_poly():
    """t1^2 t2 + t1 t2^3: vertices (1, 3) and (2, 1)."""
    return parse_polynomial("t1^2*t2 + t1*t2^3", 2)


@pytest.fixture
def two_vertex_diagram(two_vertex_poly):
    return build_diagram(two_vertex_poly)


@pytest.fixture
def axis_poly():
    """t1^2 + t2^3: both vertices on coordinate axes."""
    return parse_polynomial("t1^2 + t2^3", 2)


@pytest.fixture(params=[
    ("t1^2*t2 + t1*t2^3", 2),
    ("t1^2 + t2^3", 2),
    ("t1^3 + t1*t2 + t2^3", 2),
    ("t1^2 + t1*t2", 2),
    ("t1*t2*t3", 3),
    ("t1^2 + t2^2 + t3^2", 3),
])
def corpus_diagram(request):
    """Parametrized fixture over the partition corpus."""
    text, n = request.param
    return build_diagram(parse_polynomial(text, n))
