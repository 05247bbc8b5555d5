"""
Verification report.
Collects violations and measured constants and renders them as JSON, Markdown or text.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, List

import numpy as np

SEVERITIES = ("error", "warning", "info")


@dataclass
class Violation:
    """A single failed (or noteworthy) check."""
    suite: str
    check: str  # 'coverage', 'mean_zero', 'decay_fit', ...
    severity: str  # 'error', 'warning', 'info'
    description: str
    expected: str = ""
    actual: str = ""
    location: str = ""  # vertex, polynomial, grid point, ...


def to_jsonable(value: Any) -> Any:
    """Convert measurements to plain JSON values with deterministic encoding."""
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if math.isnan(value):
            return "nan"
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return value
    if isinstance(value, np.ndarray):
        return [to_jsonable(v) for v in value.tolist()]
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    if isinstance(value, (frozenset, set)):
        return sorted(to_jsonable(v) for v in value)
    return value


@dataclass
class VerificationReport:
    """Collects and formats verification results."""
    violations: List[Violation] = field(default_factory=list)
    suites_run: List[str] = field(default_factory=list)
    measurements: Dict[str, Dict[str, Any]] = field(default_factory=dict)
    artifacts: List[str] = field(default_factory=list)

    def add_violation(self, suite: str, check: str, severity: str,
                      description: str, expected: str = "", actual: str = "",
                      location: str = ""):
        """Add a new violation to the report."""
        if severity not in SEVERITIES:
            raise ValueError(f"unknown severity {severity!r}")
        self.violations.append(Violation(
            suite=suite,
            check=check,
            severity=severity,
            description=description,
            expected=expected,
            actual=actual,
            location=location,
        ))

    def add_suite(self, suite: str):
        """Mark a suite as run."""
        if suite not in self.suites_run:
            self.suites_run.append(suite)

    def record(self, suite: str, key: str, value: Any):
        """Store a measured constant under ``suite``."""
        self.add_suite(suite)
        self.measurements.setdefault(suite, {})[key] = to_jsonable(value)

    def add_artifact(self, name: str):
        if name not in self.artifacts:
            self.artifacts.append(name)

    def get_violations_by_suite(self, suite: str) -> List[Violation]:
        return [v for v in self.violations if v.suite == suite]

    def get_violations_by_severity(self, severity: str) -> List[Violation]:
        return [v for v in self.violations if v.severity == severity]

    def has_errors(self) -> bool:
        """Check if there are any error-level violations."""
        return any(v.severity == 'error' for v in self.violations)

    def generate_summary(self) -> Dict:
        """Generate summary statistics."""
        return {
            'suites_run': len(self.suites_run),
            'total_violations': len(self.violations),
            'errors': len(self.get_violations_by_severity('error')),
            'warnings': len(self.get_violations_by_severity('warning')),
            'info': len(self.get_violations_by_severity('info')),
            'by_check': self._count_by('check'),
            'by_suite': self._count_by('suite'),
            'passed': not self.has_errors(),
        }

    def _count_by(self, attribute: str) -> Dict[str, int]:
        counts: Dict[str, int] = {}
        for violation in self.violations:
            key = getattr(violation, attribute)
            counts[key] = counts.get(key, 0) + 1
        return counts

    def to_dict(self) -> Dict:
        return {
            'summary': self.generate_summary(),
            'suites': list(self.suites_run),
            'measurements': self.measurements,
            'violations': [
                {
                    'suite': v.suite,
                    'check': v.check,
                    'severity': v.severity,
                    'description': v.description,
                    'expected': v.expected,
                    'actual': v.actual,
                    'location': v.location,
                }
                for v in self.violations
            ],
            'artifacts': sorted(self.artifacts),
        }

    def to_json(self, filepath: Path):
        """Export report as JSON; identical reports give identical bytes."""
        with open(filepath, 'w', encoding='utf-8') as f:
            json.dump(self.to_dict(), f, ensure_ascii=False, indent=2, sort_keys=True)
            f.write('\n')

    def to_markdown(self, filepath: Path):
        """Export report as Markdown."""
        lines = ["# Verification report\n"]

        summary = self.generate_summary()
        lines.append("## Summary\n")
        lines.append(f"- **Suites run:** {', '.join(self.suites_run) or 'none'}")
        lines.append(f"- **Violations:** {summary['total_violations']}")
        lines.append(f"  - ❌ Errors: {summary['errors']}")
        lines.append(f"  - ⚠️ Warnings: {summary['warnings']}")
        lines.append(f"  - ℹ️ Info: {summary['info']}\n")

        for suite in self.suites_run:
            lines.append(f"## {suite}\n")
            measured = self.measurements.get(suite, {})
            if measured:
                lines.append("### Measurements\n")
                for key in sorted(measured):
                    lines.append(f"- `{key}`: `{json.dumps(measured[key], sort_keys=True)}`")
                lines.append("")

            suite_violations = self.get_violations_by_suite(suite)
            if not suite_violations:
                lines.append("✅ No violations\n")
                continue
            lines.append(f"**Violations:** {len(suite_violations)}\n")
            for violation in suite_violations:
                icon = {'error': '❌', 'warning': '⚠️', 'info': 'ℹ️'}.get(violation.severity, '•')
                lines.append(f"{icon} **{violation.check}**: {violation.description}")
                if violation.expected:
                    lines.append(f"  - Expected: `{violation.expected}`")
                if violation.actual:
                    lines.append(f"  - Actual: `{violation.actual}`")
                if violation.location:
                    lines.append(f"  - Location: {violation.location}")
                lines.append("")

        with open(filepath, 'w', encoding='utf-8') as f:
            f.write('\n'.join(lines))

    def to_text(self, filepath: Path):
        """Export report as plain text."""
        lines = ["=" * 80, "VERIFICATION REPORT", "=" * 80]

        summary = self.generate_summary()
        lines.append("SUMMARY:")
        lines.append(f"  Suites run: {summary['suites_run']}")
        lines.append(f"  Violations: {summary['total_violations']}")
        lines.append(f"    - Errors: {summary['errors']}")
        lines.append(f"    - Warnings: {summary['warnings']}")
        lines.append(f"    - Info: {summary['info']}\n")

        for suite in self.suites_run:
            lines.append("-" * 80)
            lines.append(f"SUITE: {suite}")
            lines.append("-" * 80)
            suite_violations = self.get_violations_by_suite(suite)
            if not suite_violations:
                lines.append("  OK\n")
                continue
            for i, violation in enumerate(suite_violations, 1):
                lines.append(f"  {i}. [{violation.severity.upper()}] {violation.check.upper()}")
                lines.append(f"     {violation.description}")
                if violation.expected:
                    lines.append(f"     Expected: {violation.expected}")
                if violation.actual:
                    lines.append(f"     Actual: {violation.actual}")
                if violation.location:
                    lines.append(f"     Location: {violation.location}")
                lines.append("")

        lines.append("=" * 80)

        with open(filepath, 'w', encoding='utf-8') as f:
            f.write('\n'.join(lines))
