"""Numerical multi-parameter maximal operators.

Provides:
- :func:`maximal_continuous`: sup over h in a geometric grid of averages over [0, h]^n
- :func:`maximal_dyadic`: sup over dyadic boxes, or the eta-smoothed sup
- :func:`hardy_littlewood`: uncentered maximal function over grid intervals
- :func:`monomial_domination_check`: M f <= 2 M_H f for a single positive monomial
- :func:`maximal_cone_restricted` / :func:`cone_split` / :func:`comparison_recursive`:
  the eta-smoothed sup restricted to one cone of a Newton diagram and its pieces

Every average is a pushforward sum evaluated by :func:`pushforward_average`.
Suprema are reduced in a fixed order, so results do not depend on ``workers``.
"""

from __future__ import annotations

import csv
import itertools
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Iterable, Sequence

import numpy as np
from scipy.ndimage import maximum_filter1d

from newton_maximal.diagram import NewtonDiagram
from newton_maximal.grid import EtaWindow, GridFunction, midpoint_rule, pushforward_average, tensor_rule
from newton_maximal.polynomial import Polynomial, lambda0_split
from newton_maximal.report import VerificationReport

logger = logging.getLogger(__name__)

DEFAULT_ORDER = 16


@dataclass(frozen=True, eq=False)
class MaximalResult:
    """Operator values on the midpoints of the input grid.

    ``argmax`` holds the maximizing parameter per point: an h-vector, a
    q-vector, or an interval length in cells for the Hardy-Littlewood
    operator.
    """

    kind: str
    x: np.ndarray
    values: np.ndarray
    argmax: np.ndarray
    truncation: int | None = None
    quadrature_order: int | None = None

    @property
    def dx(self) -> float:
        return float(self.x[1] - self.x[0]) if self.x.size > 1 else 1.0

    def to_csv(self, path: Path) -> None:
        with open(path, "w", newline="", encoding="utf-8") as handle:
            writer = csv.writer(handle)
            writer.writerow(["x", "value", "argmax"])
            for x, value, label in zip(self.x, self.values, self.argmax):
                writer.writerow([repr(float(x)), repr(float(value)), ";".join(str(v) for v in np.atleast_1d(label))])


Job = Callable[[], np.ndarray]


def _supremum(
    f: GridFunction,
    labels: Sequence[Sequence[float]],
    jobs: Iterable[Job],
    workers: int = 1,
) -> tuple[np.ndarray, np.ndarray]:
    """Pointwise max over job outputs, reduced in label order."""

    labels = np.asarray(labels, dtype=float)
    best = np.zeros(f.size)
    best_index = np.zeros(f.size, dtype=np.int64)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            outputs = list(pool.map(lambda job: job(), jobs))
    else:
        outputs = (job() for job in jobs)
    for index, output in enumerate(outputs):
        better = output > best
        best = np.where(better, output, best)
        best_index[better] = index
    if labels.size == 0:
        return best, np.zeros((f.size, 0))
    return best, labels[best_index]


def _average_job(f: GridFunction, p: Polynomial, points: np.ndarray, weights: np.ndarray) -> Job:
    return lambda: pushforward_average(f, p.evaluate(points), weights)


def maximal_continuous(
    f: GridFunction,
    p: Polynomial,
    h_grid_size: int,
    order: int = DEFAULT_ORDER,
    workers: int = 1,
) -> MaximalResult:
    """sup over h in {2^{-i/2}}^n, i = 0..2 h_grid_size, of the [0, h]^n averages."""

    if h_grid_size < 4:
        raise ValueError(f"h_grid_size must be >= 4, got {h_grid_size}")
    unit, _ = midpoint_rule(0.0, 1.0, order)
    sides = 2.0 ** (-np.arange(2 * h_grid_size + 1) / 2.0)
    labels = list(itertools.product(sides, repeat=p.n))
    weight = 1.0 / order ** p.n
    jobs = []
    for h in labels:
        points, _ = tensor_rule([unit * side for side in h], [np.ones(order)] * p.n)
        jobs.append(_average_job(f, p, points, np.full(points.shape[0], weight)))
    values, argmax = _supremum(f, labels, jobs, workers)
    logger.debug(f"Continuous maximal function over {len(labels)} h-vectors")
    return MaximalResult("continuous", f.midpoints, values, argmax, h_grid_size, order)


def dyadic_indices(n: int, q_max: int, min_level: int = 0) -> list[tuple[int, ...]]:
    return list(itertools.product(range(min_level, q_max + 1), repeat=n))


def eta_average(f: GridFunction, p: Polynomial, q: Sequence[int], window: EtaWindow) -> np.ndarray:
    """int f(x - P(2^{-q} t)) prod eta(t_i) dt on the grid."""

    points, weights = window.tensor(p.n)
    scaled = points * 2.0 ** (-np.asarray(q, dtype=float))
    return pushforward_average(f, p.evaluate(scaled), weights)


def _box_average(f: GridFunction, p: Polynomial, q: Sequence[int], order: int) -> np.ndarray:
    unit, _ = midpoint_rule(1.0, 2.0, order)
    points, _ = tensor_rule([unit * 2.0 ** (-level) for level in q], [np.ones(order)] * p.n)
    return pushforward_average(f, p.evaluate(points), np.full(points.shape[0], 1.0 / order ** p.n))


def maximal_dyadic(
    f: GridFunction,
    p: Polynomial,
    q_max: int,
    order: int = DEFAULT_ORDER,
    smoothed: bool = False,
    window: EtaWindow | None = None,
    min_level: int = 0,
    workers: int = 1,
) -> MaximalResult:
    """Dyadic-box sup over q in {min_level..q_max}^n, or the eta-smoothed sup."""

    if q_max < 1:
        raise ValueError(f"q_max must be >= 1, got {q_max}")
    window = window or EtaWindow(order)
    labels = dyadic_indices(p.n, q_max, min_level)
    if smoothed:
        jobs = [lambda q=q: eta_average(f, p, q, window) for q in labels]
    else:
        jobs = [lambda q=q: _box_average(f, p, q, order) for q in labels]
    values, argmax = _supremum(f, labels, jobs, workers)
    kind = "eta" if smoothed else "dyadic"
    return MaximalResult(kind, f.midpoints, values, argmax.astype(np.int64), q_max, window.nodes if smoothed else order)


def hardy_littlewood(f: GridFunction) -> MaximalResult:
    """Uncentered maximal function over all unions of consecutive cells containing x."""

    size = f.size
    prefix = np.concatenate([[0.0], np.cumsum(f.values)])
    best = np.zeros(size)
    best_length = np.ones(size, dtype=np.int64)
    for length in range(1, size + 1):
        means = (prefix[length:] - prefix[:-length]) / length
        padding = np.full(length - 1, -np.inf)
        padded = np.concatenate([padding, means, padding])
        window_max = maximum_filter1d(padded, size=length, mode="constant", cval=-np.inf)
        covering = window_max[length // 2: length // 2 + size]
        better = covering > best
        best = np.where(better, covering, best)
        best_length[better] = length
    return MaximalResult("hardy_littlewood", f.midpoints, best, best_length.reshape(-1, 1))


def monomial_domination_check(
    f: GridFunction,
    p: Polynomial,
    h_grid_size: int = 6,
    order: int = DEFAULT_ORDER,
    tolerance: float = 0.05,
    report: VerificationReport | None = None,
    suite: str = "monomial",
    reference: MaximalResult | None = None,
) -> VerificationReport:
    """Check M f <= 2 M_H f + tolerance * max M_H f on the whole grid.

    Records the largest ratio M f / M_H f (0 for f = 0). A precomputed
    ``reference`` Hardy-Littlewood result for ``f`` may be passed in.
    """

    if not p.is_monomial or p.terms[0][1] <= 0:
        raise ValueError("monomial_domination_check needs a single term with positive coefficient")
    report = report if report is not None else VerificationReport()
    report.add_suite(suite)
    operator = maximal_continuous(f, p, h_grid_size, order).values
    reference = (reference or hardy_littlewood(f)).values
    scale = float(reference.max()) if reference.size else 0.0
    slack = tolerance * scale
    excess = operator - 2.0 * reference
    positive = reference > 0
    ratio = float(np.max(operator[positive] / reference[positive])) if positive.any() else 0.0
    worst = int(np.argmax(excess))
    if excess[worst] > slack:
        report.add_violation(
            suite,
            "monomial_domination",
            "error",
            f"M f exceeds 2 M_H f for {p.to_text()}",
            expected=f"<= {2.0 * reference[worst] + slack!r}",
            actual=repr(float(operator[worst])),
            location=f"x={float(f.midpoints[worst])!r}",
        )
    report.record(suite, f"{p.to_text()}|mass={f.mass!r}", {"max_ratio": ratio, "max_excess": float(excess.max())})
    return report


# ---------------------------------------------------------------------------
# Cone-restricted pieces
# ---------------------------------------------------------------------------


def cone_indices(diagram: NewtonDiagram, j: int, q_max: int) -> list[tuple[int, ...]]:
    """S(j) intersected with {0..q_max}^n."""

    diagram.vertex(j)
    return [q for q in dyadic_indices(diagram.n, q_max) if diagram.contains(j, q)]


def comparison_polynomial(diagram: NewtonDiagram, j: int) -> Polynomial:
    """Vertex monomial for a vertex without zero coordinates, else the Lambda_0 part."""

    data = diagram.vertex(j)
    p = diagram.polynomial
    if not data.zero_coords:
        return p.restricted_to([data.vertex])
    inside, _ = lambda0_split(p, data.vertex, data.zero_coords)
    return inside


def maximal_cone_restricted(
    f: GridFunction,
    p: Polynomial,
    diagram: NewtonDiagram,
    j: int,
    q_max: int,
    window: EtaWindow | None = None,
    workers: int = 1,
) -> MaximalResult:
    """eta-smoothed sup restricted to q in S(j), q <= q_max.

    Raises:
        IndexError: If ``j`` is not a vertex index of ``diagram``.
    """

    window = window or EtaWindow()
    labels = cone_indices(diagram, j, q_max)
    jobs = [lambda q=q: eta_average(f, p, q, window) for q in labels]
    values, argmax = _supremum(f, labels, jobs, workers)
    return MaximalResult(f"cone[{j}]", f.midpoints, values, argmax.astype(np.int64), q_max, window.nodes)


@dataclass(frozen=True, eq=False)
class ConeSplit:
    """M(j) (difference against the comparison) and Q(j) (comparison alone)."""

    main: MaximalResult
    comparison: MaximalResult


def cone_split(
    f: GridFunction,
    diagram: NewtonDiagram,
    j: int,
    q_max: int,
    window: EtaWindow | None = None,
) -> ConeSplit:
    window = window or EtaWindow()
    p = diagram.polynomial
    reference = comparison_polynomial(diagram, j)
    labels = cone_indices(diagram, j, q_max)
    points, weights = window.tensor(p.n)

    def samples(q: Sequence[int]) -> tuple[np.ndarray, np.ndarray]:
        scaled = points * 2.0 ** (-np.asarray(q, dtype=float))
        return p.evaluate(scaled), reference.evaluate(scaled)

    def difference(q: Sequence[int]) -> np.ndarray:
        full, compared = samples(q)
        return np.abs(pushforward_average(f, full, weights) - pushforward_average(f, compared, weights))

    def compared_only(q: Sequence[int]) -> np.ndarray:
        _, compared = samples(q)
        return np.abs(pushforward_average(f, compared, weights))

    main_values, main_argmax = _supremum(f, labels, [lambda q=q: difference(q) for q in labels])
    cmp_values, cmp_argmax = _supremum(f, labels, [lambda q=q: compared_only(q) for q in labels])
    return ConeSplit(
        main=MaximalResult(f"main[{j}]", f.midpoints, main_values, main_argmax.astype(np.int64), q_max, window.nodes),
        comparison=MaximalResult(f"comparison[{j}]", f.midpoints, cmp_values, cmp_argmax.astype(np.int64), q_max, window.nodes),
    )


def comparison_recursive(
    f: GridFunction,
    diagram: NewtonDiagram,
    j: int,
    q_max: int,
    window: EtaWindow | None = None,
) -> MaximalResult:
    """Q(j) through the lower-parameter maximal function in the nonzero coordinates.

    The Lambda_0 part does not depend on t_A, so the t_A integral factors
    out as (integral of eta)^{|A|}. The remaining sup runs over the
    projections q_B of S(j) with the |B|-variable polynomial.
    """

    window = window or EtaWindow()
    data = diagram.vertex(j)
    reference = comparison_polynomial(diagram, j)
    if not data.zero_coords:
        return cone_split(f, diagram, j, q_max, window).comparison

    factor = window.integral ** len(data.zero_coords)
    kept = sorted(data.nonzero_coords)
    if not kept:
        constant = reference.coefficient((0,) * diagram.n)
        values = factor * f.sample(f.midpoints - constant)
        argmax = np.zeros((f.size, 0), dtype=np.int64)
        return MaximalResult(f"comparison_recursive[{j}]", f.midpoints, values, argmax, q_max, window.nodes)

    reduced = reference.restrict_variables(kept)
    projected = sorted({tuple(q[i] for i in kept) for q in cone_indices(diagram, j, q_max)})
    jobs = [lambda qb=qb: factor * eta_average(f, reduced, qb, window) for qb in projected]
    values, argmax = _supremum(f, projected, jobs)
    return MaximalResult(f"comparison_recursive[{j}]", f.midpoints, values, argmax.astype(np.int64), q_max, window.nodes)


def truncation_defect(f: GridFunction, p: Polynomial, q_max: int, window: EtaWindow | None = None) -> float:
    """Relative L-infinity change of the eta-smoothed sup between q_max - 2 and q_max."""

    if q_max < 3:
        raise ValueError(f"q_max must be >= 3, got {q_max}")
    window = window or EtaWindow()
    upper = maximal_dyadic(f, p, q_max, smoothed=True, window=window).values
    lower = maximal_dyadic(f, p, q_max - 2, smoothed=True, window=window).values
    scale = float(np.max(np.abs(upper)))
    return 0.0 if scale == 0 else float(np.max(np.abs(upper - lower)) / scale)
