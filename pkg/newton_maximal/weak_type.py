"""Weak-type (1,1) harness: test functions, distribution functions and stability sweeps."""

from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Sequence

import numpy as np
from scipy.stats import linregress

from newton_maximal.diagram import NewtonDiagram, build_diagram
from newton_maximal.errors import GridError
from newton_maximal.grid import EtaWindow, GridFunction, GridSpec
from newton_maximal.maximal import (
    DEFAULT_ORDER,
    MaximalResult,
    maximal_cone_restricted,
    maximal_continuous,
    maximal_dyadic,
)
from newton_maximal.oscillatory import level_operator, measure_family
from newton_maximal.polynomial import Polynomial
from newton_maximal.report import VerificationReport

logger = logging.getLogger(__name__)

ALPHA_POINTS = 64
ALPHA_LO = 1e-3
ALPHA_HI = 1.5

DELTA_GROWTH_LIMIT = 2.0


class FunctionKind(str, Enum):
    INDICATOR = "indicator"
    BUMP_SUM = "bump_sum"
    DELTA_LIKE = "delta_like"


@dataclass(frozen=True, eq=False)
class TestFunction:
    """A named nonnegative step function with exact mass."""

    __test__ = False

    kind: FunctionKind
    parameters: dict
    function: GridFunction

    def __post_init__(self) -> None:
        if not self.function.mass > 0:
            raise GridError(f"{self.kind.value} test function has no mass")

    @property
    def mass(self) -> float:
        return self.function.mass

    @property
    def name(self) -> str:
        details = ",".join(f"{key}={value}" for key, value in sorted(self.parameters.items()))
        return f"{self.kind.value}({details})"


def indicator_function(a: float, b: float, grid: GridSpec) -> TestFunction:
    return TestFunction(FunctionKind.INDICATOR, {"a": a, "b": b}, grid.steps([(a, b, 1.0)]))


def bump_sum(bumps: Sequence[tuple[float, float, float]], grid: GridSpec) -> TestFunction:
    """Sum of height * 1_[left, left + width) for (left, width, height) in ``bumps``."""

    pieces = [(left, left + width, height) for left, width, height in bumps]
    return TestFunction(FunctionKind.BUMP_SUM, {"bumps": len(bumps)}, grid.steps(pieces))


def delta_like(position: float, width: float, grid: GridSpec, mass: float = 1.0) -> TestFunction:
    """mass / width on [position, position + width)."""

    if width < grid.dx:
        raise GridError(f"width {width} is below the grid step {grid.dx}")
    function = grid.steps([(position, position + width, mass / width)])
    return TestFunction(FunctionKind.DELTA_LIKE, {"position": position, "width": width}, function)


def default_corpus(grid: GridSpec, size: int = 20, seed: int = 0) -> list[TestFunction]:
    """Indicator of [0, 1), one delta-like function, then random dyadic bump sums in [-2, 2)."""

    if grid.x_lo > -4 or grid.x_hi < 4:
        raise GridError(f"corpus needs a grid containing [-4, 4], got [{grid.x_lo}, {grid.x_hi}]")
    if size < 1:
        raise ValueError(f"corpus size must be positive, got {size}")
    rng = np.random.default_rng(seed)
    corpus = [indicator_function(0.0, 1.0, grid)]
    if size > 1:
        corpus.append(delta_like(0.0, 8 * grid.dx, grid))
    span = int(round(2.0 / grid.dx))
    widest = min(10, span.bit_length())
    while len(corpus) < size:
        bumps = []
        for _ in range(int(rng.integers(1, 5))):
            cells = 2 ** int(rng.integers(3, widest))
            start = int(rng.integers(-span, span - cells))
            height = float(rng.integers(1, 9)) / 4.0
            bumps.append((start * grid.dx, cells * grid.dx, height))
        corpus.append(bump_sum(bumps, grid))
    return corpus


# ---------------------------------------------------------------------------
# Operators
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class OperatorSettings:
    """Which maximal operator the weak functional is measured on."""

    kind: str = "continuous"
    h_grid_size: int = 6
    q_max: int = 8
    order: int = DEFAULT_ORDER
    eta_nodes: int = 16
    workers: int = 1

    def __post_init__(self) -> None:
        if self.kind not in ("continuous", "eta", "dyadic"):
            raise ValueError(f"unknown operator kind {self.kind!r}")

    def apply(self, f: GridFunction, p: Polynomial) -> MaximalResult:
        if self.kind == "continuous":
            return maximal_continuous(f, p, self.h_grid_size, self.order, self.workers)
        if self.kind == "eta":
            return maximal_dyadic(f, p, self.q_max, smoothed=True, window=EtaWindow(self.eta_nodes), workers=self.workers)
        return maximal_dyadic(f, p, self.q_max, self.order, workers=self.workers)


# ---------------------------------------------------------------------------
# Distribution functions
# ---------------------------------------------------------------------------


def alpha_grid(sup: float, points: int = ALPHA_POINTS, lo: float = ALPHA_LO, hi: float = ALPHA_HI) -> np.ndarray:
    """Geometric grid spanning [lo, hi] * sup; empty if sup is not positive."""

    if not sup > 0:
        return np.zeros(0)
    return sup * np.geomspace(lo, hi, points)


def distribution_function(result: MaximalResult | np.ndarray, alphas: np.ndarray, dx: float | None = None) -> np.ndarray:
    """|{x : Op f(x) > alpha}| as count * dx for each alpha."""

    alphas = np.asarray(alphas, dtype=float)
    if np.any(alphas <= 0) or np.any(np.diff(alphas) <= 0):
        raise ValueError("alpha grid must be positive and increasing")
    if isinstance(result, MaximalResult):
        values, dx = result.values, result.dx if dx is None else dx
    else:
        values = np.asarray(result, dtype=float)
        if dx is None:
            raise ValueError("dx is required for raw values")
    ordered = np.sort(values)
    counts = ordered.size - np.searchsorted(ordered, alphas, side="right")
    return counts * dx


@dataclass(frozen=True, eq=False)
class WeakTypeReport:
    alphas: np.ndarray
    measures: np.ndarray
    value: float
    mass: float
    maximizing_alpha: float | None
    table: list = field(default_factory=list)


def weak_type_profile(
    result: MaximalResult,
    f: GridFunction,
    points: int = ALPHA_POINTS,
    lo: float = ALPHA_LO,
    hi: float = ALPHA_HI,
) -> WeakTypeReport:
    """W = max over the alpha grid of alpha |{Op f > alpha}| / ||f||_1.

    Raises:
        ValueError: If ``f`` has no mass.
    """

    mass = f.mass
    if not mass > 0:
        raise ValueError("weak-type functional needs a function with positive mass")
    sup = float(np.max(result.values, initial=0.0))
    alphas = alpha_grid(sup, points, lo, hi)
    if alphas.size == 0:
        return WeakTypeReport(alphas, np.zeros(0), 0.0, mass, None)
    measures = distribution_function(result, alphas)
    scores = alphas * measures / mass
    best = int(np.argmax(scores))
    return WeakTypeReport(alphas, measures, float(scores[best]), mass, float(alphas[best]))


def weak_type_functional(result: MaximalResult, f: GridFunction, **alpha_options) -> float:
    return weak_type_profile(result, f, **alpha_options).value


def chebyshev_bound(result: MaximalResult, f: GridFunction) -> float:
    """sup(Op f) |supp Op f| / ||f||_1, an upper bound for W."""

    support = float(np.count_nonzero(result.values > 0) * result.dx)
    return float(np.max(result.values, initial=0.0)) * support / f.mass


# ---------------------------------------------------------------------------
# Stability sweeps
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SweepSettings:
    operator: OperatorSettings = OperatorSettings()
    levels: tuple[int, ...] = (2, 3, 4, 5, 6, 7, 8)
    k_max: int = 2
    measure_nodes: int = 16
    bins_log2: int = 10
    alpha_points: int = ALPHA_POINTS
    alpha_lo: float = ALPHA_LO
    alpha_hi: float = ALPHA_HI
    tolerance: float = 0.2
    delta_widths: tuple[int, ...] = (256, 128, 64, 32, 16, 8, 4, 2)
    coefficient_scales: tuple[float, ...] = (0.25, 1.0, 4.0)
    translations: tuple[int, ...] = (37, -101)
    homogeneity_factor: float = 1024.0


@dataclass(frozen=True)
class LevelFit:
    """log2 W = log2 C - delta * N (or - gamma . k for axis fits)."""

    rate: tuple[float, ...]
    constant: float
    r_squared: float
    points: int
    vanishing: bool


@dataclass
class StabilityResult:
    polynomial: str
    corpus: dict[str, float] = field(default_factory=dict)
    translations: dict[int, float] = field(default_factory=dict)
    homogeneity_defect: float = 0.0
    vertex: dict[int, float] = field(default_factory=dict)
    levels: list[tuple[int, int, int, float]] = field(default_factory=list)
    level_fits: dict[int, LevelFit] = field(default_factory=dict)
    axis: list[tuple[int, tuple[int, ...], float]] = field(default_factory=list)
    axis_fits: dict[int, LevelFit] = field(default_factory=dict)
    delta_curve: list[tuple[float, float]] = field(default_factory=list)
    coefficient_sweep: dict[float, float] = field(default_factory=dict)

    @property
    def max_w(self) -> float:
        return max(self.corpus.values(), default=0.0)

    @property
    def spread(self) -> float:
        values = [w for w in self.corpus.values() if w > 0]
        return max(values) / min(values) - 1.0 if values else 0.0

    def level_rows(self) -> list[list[str]]:
        """Rows for the vertex,N,W,fit_delta table."""

        best: dict[tuple[int, int], float] = {}
        for j, _, level, w in self.levels:
            best[(j, level)] = max(best.get((j, level), 0.0), w)
        rows = []
        for (j, level), w in sorted(best.items()):
            fit = self.level_fits.get(j)
            delta = "" if fit is None or fit.vanishing else repr(fit.rate[0])
            rows.append([str(j), str(level), repr(w), delta])
        return rows


def _fit_levels(samples: Sequence[tuple[Sequence[float], float]]) -> LevelFit:
    """Least-squares fit of log2 W against the offsets; rates are the negated slopes."""

    usable = [(x, w) for x, w in samples if w > 0]
    dimension = len(samples[0][0]) if samples else 1
    if len(usable) < dimension + 1:
        return LevelFit(tuple(math.nan for _ in range(dimension)), 0.0, math.nan, len(usable), True)
    design = np.array([[1.0, *x] for x, _ in usable])
    target = np.log2([w for _, w in usable])
    if dimension == 1:
        fit = linregress(design[:, 1], target)
        return LevelFit((-float(fit.slope),), 2.0 ** float(fit.intercept), float(fit.rvalue ** 2), len(usable), False)
    coefficients, *_ = np.linalg.lstsq(design, target, rcond=None)
    residual = target - design @ coefficients
    total = float(np.sum((target - target.mean()) ** 2))
    r_squared = 1.0 - float(np.sum(residual ** 2)) / total if total > 0 else 1.0
    return LevelFit(tuple(-float(c) for c in coefficients[1:]), 2.0 ** float(coefficients[0]), r_squared, len(usable), False)


def stability_sweep(
    p: Polynomial,
    corpus: Sequence[TestFunction],
    settings: SweepSettings = SweepSettings(),
    diagram: NewtonDiagram | None = None,
    report: VerificationReport | None = None,
    suite: str = "weaktype",
) -> StabilityResult:
    """Measure W across the corpus and the per-level pieces of every vertex.

    Raises:
        ValueError: If ``corpus`` is empty.
    """

    if not corpus:
        raise ValueError("stability sweep needs a nonempty corpus")
    report = report if report is not None else VerificationReport()
    report.add_suite(suite)
    diagram = diagram or build_diagram(p)
    text = p.to_text()
    alpha = {"points": settings.alpha_points, "lo": settings.alpha_lo, "hi": settings.alpha_hi}
    operator = settings.operator
    result = StabilityResult(text)

    def measure(f: GridFunction, poly: Polynomial = p) -> tuple[float, MaximalResult]:
        output = operator.apply(f, poly)
        return weak_type_functional(output, f, **alpha), output

    for tf in corpus:
        w, output = measure(tf.function)
        result.corpus[tf.name] = w
        bound = chebyshev_bound(output, tf.function)
        if w > bound * (1 + 1e-12):
            report.add_violation(suite, "chebyshev", "error", "W exceeds the sup-times-support bound",
                                 f"<= {bound!r}", repr(w), f"{text} | {tf.name}")
    logger.info(f"{text}: corpus max W = {result.max_w!r}, spread = {result.spread!r}")
    if result.spread > settings.tolerance:
        report.add_violation(suite, "corpus_stability", "error",
                             f"W varies by more than {settings.tolerance:.0%} across the corpus",
                             f"<= {settings.tolerance!r}", repr(result.spread), text)

    reference = corpus[0]
    base_w = result.corpus[reference.name]
    scaled_w, _ = measure(reference.function.scaled(settings.homogeneity_factor))
    result.homogeneity_defect = abs(scaled_w - base_w) / base_w if base_w else 0.0
    if result.homogeneity_defect > 1e-9:
        report.add_violation(suite, "homogeneity", "error", "W changes under f -> c f",
                             repr(base_w), repr(scaled_w), f"{text} | c={settings.homogeneity_factor!r}")
    for cells in settings.translations:
        try:
            shifted = reference.function.translated(cells)
        except GridError:
            logger.warning(f"Translation by {cells} cells leaves the grid; skipped")
            continue
        w, _ = measure(shifted)
        result.translations[cells] = w
        if base_w and abs(w - base_w) / base_w > settings.tolerance:
            report.add_violation(suite, "translation", "error", f"W changes under translation by {cells} cells",
                                 repr(base_w), repr(w), text)

    window = EtaWindow(operator.eta_nodes)
    for j in range(len(diagram.vertices)):
        piece = maximal_cone_restricted(reference.function, p, diagram, j, operator.q_max, window, operator.workers)
        result.vertex[j] = weak_type_functional(piece, reference.function, **alpha)

    _level_sweep(p, diagram, reference.function, settings, result, report, suite, alpha)
    _delta_sweep(p, settings, result, report, suite, reference.function, measure)

    for c in settings.coefficient_scales:
        result.coefficient_sweep[c] = measure(reference.function, p.scaled(c))[0]

    report.record(suite, text, {
        "corpus_max_W": result.max_w,
        "corpus_spread": result.spread,
        "homogeneity_defect": result.homogeneity_defect,
        "translations": result.translations,
        "vertex_W": result.vertex,
        "level_fits": {j: fit.__dict__ for j, fit in result.level_fits.items()},
        "axis_fits": {j: fit.__dict__ for j, fit in result.axis_fits.items()},
        "delta_curve": result.delta_curve,
        "coefficient_sweep": {repr(c): w for c, w in result.coefficient_sweep.items()},
    })
    return result


def _level_sweep(
    p: Polynomial,
    diagram: NewtonDiagram,
    f: GridFunction,
    settings: SweepSettings,
    result: StabilityResult,
    report: VerificationReport,
    suite: str,
    alpha: dict,
) -> None:
    text = result.polynomial
    options = {"k_max": settings.k_max, "nodes": settings.measure_nodes, "bins_log2": settings.bins_log2}
    for j, data in enumerate(diagram.vertices):
        samples = []
        for level in settings.levels:
            best = 0.0
            for slot in range(diagram.n):
                family = measure_family(p, diagram, j, level=level, slot=slot, **options)
                w = weak_type_functional(level_operator(f, family), f, **alpha) if family else 0.0
                result.levels.append((j, slot, level, w))
                best = max(best, w)
            samples.append(((level,), best))
        fit = _fit_levels(samples)
        result.level_fits[j] = fit
        location = f"{text} | vertex {list(data.vertex)}"
        if fit.vanishing:
            logger.warning(f"Level pieces vanish at vertex {data.vertex}; no decay fit")
            report.add_violation(suite, "level_decay", "info", "level pieces vanish; fit impossible", location=location)
        elif not fit.rate[0] > 0:
            report.add_violation(suite, "level_decay", "error", "per-level weak functional does not decay in N",
                                 "> 0", repr(fit.rate[0]), location)

        if not data.zero_coords or data.gamma is None:
            continue
        axis_samples = []
        for offsets in itertools.product(range(settings.k_max + 1), repeat=len(data.axis_slots)):
            family = measure_family(p, diagram, j, axis_offsets=offsets, **options)
            w = weak_type_functional(level_operator(f, family), f, **alpha) if family else 0.0
            result.axis.append((j, offsets, w))
            axis_samples.append((offsets, w))
        fit = _fit_levels(axis_samples)
        result.axis_fits[j] = fit
        if fit.vanishing:
            report.add_violation(suite, "axis_decay", "info", "axis pieces vanish; fit impossible", location=location)
        elif not all(rate > 0 for rate in fit.rate):
            report.add_violation(suite, "axis_decay", "error", "axis weak functional does not decay in every direction",
                                 "> 0", repr(fit.rate), location)


def _delta_sweep(p, settings, result, report, suite, reference, measure) -> None:
    grid = GridSpec(reference.x_lo, reference.x_hi, -int(math.log2(reference.dx)))
    for cells in settings.delta_widths:
        if cells < 2:
            continue
        width = cells * grid.dx
        tf = delta_like(0.0, width, grid)
        result.delta_curve.append((width, measure(tf.function)[0]))
    growth = delta_growth(result.delta_curve)
    if growth > DELTA_GROWTH_LIMIT:
        report.add_violation(suite, "delta_blow_up", "error",
                             f"W at a narrower width exceeds {DELTA_GROWTH_LIMIT:g} times its value at the widest width",
                             f"<= {DELTA_GROWTH_LIMIT!r}", repr(growth), result.polynomial)


def delta_growth(curve: Sequence[tuple[float, float]]) -> float:
    """Largest W over the narrower widths divided by W at the widest width; 0 when that W vanishes."""

    if len(curve) < 2:
        return 0.0
    ordered = sorted(curve, key=lambda item: -item[0])
    reference = ordered[0][1]
    if reference <= 0:
        return 0.0
    return max(w for _, w in ordered[1:]) / reference
