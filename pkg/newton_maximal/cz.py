"""Dyadic Calderon-Zygmund decomposition on a grid, with invariant checks."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from newton_maximal.errors import GridError
from newton_maximal.grid import GridFunction
from newton_maximal.report import VerificationReport

logger = logging.getLogger(__name__)

# Dyadic constants: |Omega| <= ||f|| / threshold and averages <= 2 * threshold.
OMEGA_CONSTANT = 1.0
AVERAGE_CONSTANT = 2.0

_RELATIVE_SLACK = 1e-12


class DyadicInterval(NamedTuple):
    """Half-open [left, right) covering cells first_cell .. stop_cell - 1."""

    left: float
    right: float
    first_cell: int
    stop_cell: int

    @property
    def length(self) -> float:
        return self.right - self.left

    @property
    def center(self) -> float:
        return 0.5 * (self.left + self.right)

    def expanded(self) -> tuple[float, float]:
        """Q*: same center, twice the length."""

        half = self.length
        return self.center - half, self.center + half


@dataclass(frozen=True, eq=False)
class CZResult:
    level: float
    amplification: float
    threshold: float
    root: DyadicInterval | None
    cubes: tuple[DyadicInterval, ...]
    averages: tuple[float, ...]
    parent_averages: tuple[float, ...]
    good: GridFunction
    bad: np.ndarray
    in_omega: np.ndarray

    @property
    def omega_measure(self) -> float:
        return float(sum(cube.length for cube in self.cubes))

    def to_dict(self) -> dict:
        return {
            "level": self.level,
            "amplification": self.amplification,
            "threshold": self.threshold,
            "root": None if self.root is None else [self.root.left, self.root.right],
            "cubes": [[cube.left, cube.right] for cube in self.cubes],
            "averages": list(self.averages),
            "omega_measure": self.omega_measure,
        }


def _root_interval(f: GridFunction, support: tuple[int, int]) -> int:
    left = f.x_lo + support[0] * f.dx
    right = f.x_lo + support[1] * f.dx
    exponent = int(math.floor(math.log2(f.dx)))
    while -(2.0 ** exponent) > left or 2.0 ** exponent < right:
        exponent += 1
    return exponent


def _cells(f: GridFunction, exponent: int) -> tuple[int, int]:
    half = 2.0 ** exponent
    if -half < f.x_lo or half > f.x_hi:
        raise GridError(f"root interval [-{half}, {half}) is not contained in [{f.x_lo}, {f.x_hi}]")
    return int(round((-half - f.x_lo) / f.dx)), int(round((half - f.x_lo) / f.dx))


def cz_decompose(f: GridFunction, level: float, amplification: float = 0.0) -> CZResult:
    """Stopping-time decomposition at threshold 2^amplification * level.

    Raises:
        ValueError: If ``level`` is not positive or ``amplification`` is negative.
        GridError: If the grid is not dyadic-aligned or does not contain the root.
    """

    if not level > 0:
        raise ValueError(f"level must be positive, got {level}")
    if amplification < 0:
        raise ValueError(f"amplification must be nonnegative, got {amplification}")
    if not f.is_dyadic_aligned:
        raise GridError(f"grid (x_lo={f.x_lo}, dx={f.dx}) is not aligned to dyadic intervals")

    threshold = 2.0 ** amplification * level
    prefix = np.concatenate([[0.0], np.cumsum(f.values)])

    def average(first: int, stop: int) -> float:
        return float(prefix[stop] - prefix[first]) / (stop - first)

    support = f.support_cells()
    if support is None:
        return CZResult(
            level, amplification, threshold, None, (), (), (), f,
            np.zeros(f.size), np.zeros(f.size, dtype=bool),
        )

    exponent = _root_interval(f, support)
    first, stop = _cells(f, exponent)
    while average(first, stop) > threshold:
        exponent += 1
        logger.warning(f"Root average exceeds {threshold!r}; enlarging root to 2^{exponent}")
        first, stop = _cells(f, exponent)
    root = DyadicInterval(-(2.0 ** exponent), 2.0 ** exponent, first, stop)

    cubes: list[DyadicInterval] = []
    averages: list[float] = []
    parents: list[float] = []

    def descend(first: int, stop: int, parent_average: float) -> None:
        middle = (first + stop) // 2
        for a, b in ((first, middle), (middle, stop)):
            if prefix[b] == prefix[a]:
                continue
            value = average(a, b)
            if value > threshold:
                cubes.append(DyadicInterval(f.x_lo + a * f.dx, f.x_lo + b * f.dx, a, b))
                averages.append(value)
                parents.append(parent_average)
            elif b - a > 1:
                descend(a, b, value)

    descend(first, stop, average(first, stop))

    good_values = np.array(f.values, dtype=float)
    in_omega = np.zeros(f.size, dtype=bool)
    for cube, value in zip(cubes, averages):
        good_values[cube.first_cell:cube.stop_cell] = value
        in_omega[cube.first_cell:cube.stop_cell] = True
    bad = f.values - good_values
    bad[~in_omega] = 0.0
    logger.debug(f"CZ at threshold {threshold!r}: {len(cubes)} cube(s)")
    return CZResult(
        level=level,
        amplification=amplification,
        threshold=threshold,
        root=root,
        cubes=tuple(cubes),
        averages=tuple(averages),
        parent_averages=tuple(parents),
        good=f.with_values(good_values),
        bad=bad,
        in_omega=in_omega,
    )


def _union_length(intervals: list[tuple[float, float]]) -> float:
    total = 0.0
    current: tuple[float, float] | None = None
    for left, right in sorted(intervals):
        if current is None or left > current[1]:
            if current is not None:
                total += current[1] - current[0]
            current = (left, right)
        else:
            current = (current[0], max(current[1], right))
    if current is not None:
        total += current[1] - current[0]
    return total


def cz_verify(
    result: CZResult,
    f: GridFunction,
    report: VerificationReport | None = None,
    suite: str = "cz",
) -> VerificationReport:
    """Check every decomposition invariant and the good-part energy bound."""

    report = report if report is not None else VerificationReport()
    report.add_suite(suite)
    tau = result.threshold
    mass = float(f.values.sum() * f.dx)
    slack = _RELATIVE_SLACK * max(1.0, mass)
    location = f"level={result.level!r}, amplification={result.amplification!r}"

    def fail(check: str, description: str, expected: str = "", actual: str = "") -> None:
        report.add_violation(suite, check, "error", description, expected, actual, location)

    for previous, current in zip(result.cubes, result.cubes[1:]):
        if current.first_cell < previous.stop_cell:
            fail("disjoint", f"cubes {previous[:2]} and {current[:2]} overlap")
    if int(result.in_omega.sum()) != sum(c.stop_cell - c.first_cell for c in result.cubes):
        fail("disjoint", "Omega mask does not match the union of cubes")

    for cube, value, parent in zip(result.cubes, result.averages, result.parent_averages):
        if value > AVERAGE_CONSTANT * tau * (1 + _RELATIVE_SLACK):
            fail("average_bound", f"average on {cube[:2]} above {AVERAGE_CONSTANT} * threshold",
                 f"<= {AVERAGE_CONSTANT * tau!r}", repr(value))
        if parent > tau * (1 + _RELATIVE_SLACK):
            fail("maximality", f"parent of {cube[:2]} has average above threshold",
                 f"<= {tau!r}", repr(parent))
        integral = float(result.bad[cube.first_cell:cube.stop_cell].sum() * f.dx)
        if abs(integral) > 1e-12 * max(mass, 1e-300):
            fail("mean_zero", f"bad part on {cube[:2]} does not integrate to zero", "0", repr(integral))
        if np.any(result.good.values[cube.first_cell:cube.stop_cell] > AVERAGE_CONSTANT * tau * (1 + _RELATIVE_SLACK)):
            fail("good_bound", f"good part on {cube[:2]} exceeds 2 * threshold")

    omega = result.omega_measure
    if omega > OMEGA_CONSTANT * mass / tau + slack:
        fail("omega_measure", "|Omega| exceeds ||f||_1 / threshold",
             f"<= {mass / tau!r}", repr(omega))

    residual = f.values - result.good.values - result.bad
    if np.max(np.abs(residual), initial=0.0) > _RELATIVE_SLACK * max(1.0, float(f.values.max(initial=0.0))):
        fail("reconstruction", "f != g + b")
    if np.any(result.bad[~result.in_omega] != 0):
        fail("bad_support", "bad part is nonzero outside Omega")
    outside = f.values[~result.in_omega]
    if outside.size and outside.max() > tau * (1 + _RELATIVE_SLACK):
        fail("good_bound", "f exceeds the threshold on F", f"<= {tau!r}", repr(float(outside.max())))

    energy = float(np.sum(result.good.values ** 2) * f.dx)
    energy_bound = AVERAGE_CONSTANT * tau * mass
    if energy > energy_bound + slack * tau:
        fail("energy", "||g||_2^2 exceeds 2 * threshold * ||f||_1", f"<= {energy_bound!r}", repr(energy))

    expanded = [cube.expanded() for cube in result.cubes]
    expanded_measure = _union_length(expanded)
    if expanded_measure > 2.0 * omega * (1 + _RELATIVE_SLACK):
        fail("expanded_measure", "|Omega*| exceeds 2 |Omega|", f"<= {2 * omega!r}", repr(expanded_measure))

    midpoints = f.midpoints
    for cube, (left, right) in zip(result.cubes, expanded):
        candidates = []
        below = int(np.searchsorted(midpoints, left, side="left")) - 1
        above = int(np.searchsorted(midpoints, right, side="left"))
        if below >= 0:
            candidates.append(midpoints[below])
        if above < midpoints.size:
            candidates.append(midpoints[above])
        for x in candidates:
            if abs(x - cube.center) < 2.0 * (cube.length / 2.0):
                fail("expanded_geometry", f"point {x!r} outside Q* of {cube[:2]} is too close to its center")

    report.record(suite, location, {
        "cubes": len(result.cubes),
        "omega": omega,
        "omega_bound": mass / tau,
        "energy_ratio": energy / energy_bound if energy_bound else 0.0,
        "max_average_ratio": max((a / tau for a in result.averages), default=0.0),
    })
    return report
