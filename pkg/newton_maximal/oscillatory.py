"""Oscillatory lab: the difference measures of the operator pieces.

A measure is the pushforward of eta-weighted Lebesgue measure on
[1/2, 4]^n (or a sub/superlevel region of it) under a generator
polynomial, minus the pushforward under a comparison polynomial.

Two representations are kept:

- a signed histogram on [-R, R] for shift and L1 computations;
- direct quadrature of the oscillatory integral for the Fourier transform,
  with node doubling until the transform is stable.

Frequencies passed to the decay fits are normalized by the support radius
R, so "small" and "large" regimes mean the same thing for every measure.
"""

from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np
from scipy.integrate import trapezoid
from scipy.stats import linregress

from newton_maximal.diagram import NewtonDiagram, axis_index, slot_index
from newton_maximal.errors import DiagramError, QuadratureError, ResolutionError
from newton_maximal.grid import ETA_HI, ETA_LO, EtaWindow, GridFunction, midpoint_rule, pushforward_average, tensor_rule
from newton_maximal.maximal import MaximalResult, _supremum
from newton_maximal.polynomial import Polynomial, lambda0_split, tilde_rescale

logger = logging.getLogger(__name__)

NOISE_FLOOR = 1e-13
MIN_FIT_POINTS = 3
# Normalized frequency ranges (xi * R).
SMALL_REGIME = (1e-3, 1e-1)
LARGE_REGIME = (4.0, 64.0)
# Total quadrature nodes allowed when doubling.
MAX_QUADRATURE_NODES = 2 ** 20
_CHUNK_ELEMENTS = 2 ** 22

REGION_KINDS = ("full", "superlevel", "sublevel")
# Region names accepted by build_measure: whole box, I_theta, its complement.
MEASURE_REGIONS = ("full", "I_theta", "I_theta_c")


# ---------------------------------------------------------------------------
# Regions and measures
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Region:
    """[1/2, 4]^n, or the part where |grad P0| is above / at most ``level``."""

    kind: str = "full"
    gradient_of: Polynomial | None = None
    level: float = 0.0

    def __post_init__(self) -> None:
        if self.kind not in REGION_KINDS:
            raise ValueError(f"unknown region {self.kind!r}, expected one of {REGION_KINDS}")
        if self.kind != "full" and self.gradient_of is None:
            raise ValueError(f"region {self.kind!r} needs a polynomial")

    def mask(self, points: np.ndarray) -> np.ndarray:
        if self.kind == "full":
            return np.ones(points.shape[0], dtype=bool)
        norm = np.linalg.norm(self.gradient_of.gradient(points), axis=-1)
        return norm > self.level if self.kind == "superlevel" else norm <= self.level


FULL = Region()


def superlevel_region(p0: Polynomial, level: float) -> Region:
    return Region("superlevel", p0, float(level))


def sublevel_region(p0: Polynomial, level: float) -> Region:
    return Region("sublevel", p0, float(level))


@dataclass(frozen=True, eq=False)
class OscMeasure:
    generator: Polynomial
    comparison: Polynomial
    region: Region
    nodes: int
    radius: float
    edges: np.ndarray
    density: np.ndarray
    region_weight: float
    region_volume: float
    displacement: float
    outside_mass: float
    label: dict = field(default_factory=dict)

    @property
    def n(self) -> int:
        return self.generator.n

    @property
    def bin_width(self) -> float:
        return float(self.edges[1] - self.edges[0])

    @property
    def centers(self) -> np.ndarray:
        return 0.5 * (self.edges[:-1] + self.edges[1:])

    @property
    def total_variation(self) -> float:
        return float(np.abs(self.density).sum() * self.bin_width)

    @property
    def mass(self) -> float:
        return float(self.density.sum() * self.bin_width)

    @property
    def is_zero(self) -> bool:
        return self.displacement == 0.0

    def samples(self, nodes: int | None = None) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Generator values, comparison values and eta weights on the region."""

        points, weights = EtaWindow(nodes or self.nodes).tensor(self.n)
        keep = self.region.mask(points)
        inside = points[keep]
        return self.generator.evaluate(inside), self.comparison.evaluate(inside), weights[keep]

    def to_dict(self) -> dict:
        return {
            "generator": self.generator.to_text(),
            "comparison": self.comparison.to_text(),
            "region": self.region.kind,
            "region_level": self.region.level,
            "radius": self.radius,
            "bin_width": self.bin_width,
            "total_variation": self.total_variation,
            "mass": self.mass,
            "label": self.label,
        }


def measure_from_polynomials(
    generator: Polynomial,
    comparison: Polynomial,
    region: Region = FULL,
    nodes: int = 48,
    bins_log2: int = 14,
    label: dict | None = None,
) -> OscMeasure:
    """Histogram of the pushforward difference on [-R, R] with 2^(bins_log2 + 1) bins."""

    if generator.n != comparison.n:
        raise ValueError("generator and comparison live in different dimensions")
    radius = max(generator.bound_on_box(ETA_LO, ETA_HI), comparison.bound_on_box(ETA_LO, ETA_HI))
    if radius <= 0:
        raise ValueError("both polynomials vanish; the measure has no support bound")
    edges = np.linspace(-radius, radius, 2 ** (bins_log2 + 1) + 1)
    width = edges[1] - edges[0]

    points, weights = EtaWindow(nodes).tensor(generator.n)
    keep = region.mask(points)
    inside = points[keep]
    region_weights = weights[keep]
    y1 = generator.evaluate(inside)
    y0 = comparison.evaluate(inside)
    outside = float(region_weights[np.abs(y1) > radius].sum() + region_weights[np.abs(y0) > radius].sum())
    upper = np.histogram(y1, bins=edges, weights=region_weights)[0]
    lower = np.histogram(y0, bins=edges, weights=region_weights)[0]
    cell = ((ETA_HI - ETA_LO) / nodes) ** generator.n
    if not keep.any():
        logger.debug(f"Region {region.kind} at level {region.level!r} is empty; measure is zero")
    return OscMeasure(
        generator=generator,
        comparison=comparison,
        region=region,
        nodes=nodes,
        radius=radius,
        edges=edges,
        density=(upper - lower) / width,
        region_weight=float(region_weights.sum()),
        region_volume=float(keep.sum() * cell),
        displacement=float(np.sum(region_weights * np.abs(y1 - y0))),
        outside_mass=outside,
        label=dict(label or {}),
    )


# ---------------------------------------------------------------------------
# Indices into the decomposition
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SlotIndex:
    """Depth-N slice: slot m, level N, offsets k (one per other slot)."""

    slot: int
    level: int
    offsets: tuple[int, ...]

    def index(self, diagram: NewtonDiagram, j: int) -> tuple[int, ...]:
        return slot_index(diagram, j, self.slot, self.level, self.offsets)

    def scale(self, diagram: NewtonDiagram, j: int) -> Fraction:
        sigma = diagram.vertex(j).sigma_m(self.slot)
        return sum((s * k for s, k in zip(sigma, self.offsets)), Fraction(0))


@dataclass(frozen=True)
class AxisIndex:
    """Zero-coordinate slice: axis offsets k and B-offsets l."""

    axis_offsets: tuple[int, ...]
    b_offsets: tuple[int, ...]

    def index(self, diagram: NewtonDiagram, j: int) -> tuple[int, ...]:
        return axis_index(diagram, j, self.axis_offsets, self.b_offsets)

    def scale(self, diagram: NewtonDiagram, j: int) -> Fraction:
        sigma = diagram.vertex(j).sigma
        return sum((s * l for s, l in zip(sigma, self.b_offsets)), Fraction(0))


def region_level(diagram: NewtonDiagram, j: int, axis_offsets: Sequence[int], theta: Fraction) -> float:
    """s = 2^{-theta (gamma . k)}; 0 when an infinite gamma component is active."""

    data = diagram.vertex(j)
    if data.gamma is None:
        raise DiagramError(f"vertex {data.vertex} has no positive gamma")
    exponent = Fraction(0)
    for g, k in zip(data.gamma, axis_offsets):
        if k == 0:
            continue
        if isinstance(g, float) and math.isinf(g):
            return 0.0
        exponent += g * k
    return 2.0 ** (-float(theta * exponent))


def build_measure(
    p: Polynomial,
    diagram: NewtonDiagram,
    j: int,
    index: SlotIndex | AxisIndex,
    region: str = "full",
    theta: Fraction = Fraction(1, 4),
    nodes: int = 48,
    bins_log2: int = 14,
) -> OscMeasure:
    """Measure of vertex ``j`` at a slot or axis index.

    Slot indices compare P~ against the vertex monomial. Axis indices
    compare against the Lambda_0 part of P~ and may be restricted to the
    superlevel or sublevel set of its gradient.

    Raises:
        DiagramError: If the offsets give a non-integral index.
        ValueError: If an axis index is used on a vertex without zero coordinates,
            or a restricted region is requested for a slot index.
    """

    if region not in MEASURE_REGIONS:
        raise ValueError(f"unknown region {region!r}, expected one of {MEASURE_REGIONS}")
    data = diagram.vertex(j)
    q = index.index(diagram, j)
    scaled = tilde_rescale(p, data.vertex, q)
    generator = scaled.polynomial
    label = {"vertex": j, "q": list(q)}
    if isinstance(index, SlotIndex):
        if region != "full":
            raise ValueError("restricted regions apply to axis indices only")
        comparison = scaled.vertex_part()
        label.update(slot=index.slot, N=index.level, k=list(index.offsets))
        chosen = FULL
    else:
        if not data.zero_coords:
            raise ValueError(f"vertex {data.vertex} has no zero coordinates")
        comparison, _ = lambda0_split(generator, data.vertex, data.zero_coords)
        label.update(k=list(index.axis_offsets), l=list(index.b_offsets))
        if region == "full":
            chosen = FULL
        else:
            level = region_level(diagram, j, index.axis_offsets, theta)
            chosen = Region("superlevel" if region == "I_theta" else "sublevel", comparison, level)
            label.update(region=region, s=level)
    return measure_from_polynomials(generator, comparison, chosen, nodes, bins_log2, label)


@dataclass(frozen=True, eq=False)
class FamilyMember:
    index: SlotIndex | AxisIndex
    measure: OscMeasure
    scale: Fraction

    @property
    def dilation(self) -> float:
        return 2.0 ** (-float(self.scale))


def measure_family(
    p: Polynomial,
    diagram: NewtonDiagram,
    j: int,
    *,
    level: int | None = None,
    slot: int = 0,
    axis_offsets: Sequence[int] | None = None,
    k_max: int = 4,
    nodes: int = 16,
    bins_log2: int = 12,
) -> list[FamilyMember]:
    """Truncated family over k (slot form, ``level`` given) or over l (``axis_offsets`` given).

    Offsets that do not give an integral index are skipped.
    """

    data = diagram.vertex(j)
    if (level is None) == (axis_offsets is None):
        raise ValueError("pass exactly one of level or axis_offsets")
    if level is not None:
        candidates = [
            SlotIndex(slot, level, offsets)
            for offsets in itertools.product(range(k_max + 1), repeat=diagram.n - 1)
        ]
    else:
        candidates = [
            AxisIndex(tuple(axis_offsets), offsets)
            for offsets in itertools.product(range(k_max + 1), repeat=len(data.b_slots))
        ]
    members = []
    for index in candidates:
        try:
            measure = build_measure(p, diagram, j, index, nodes=nodes, bins_log2=bins_log2)
        except DiagramError:
            continue
        members.append(FamilyMember(index, measure, index.scale(diagram, j)))
    return members


def level_operator(f: GridFunction, family: Sequence[FamilyMember], workers: int = 1) -> MaximalResult:
    """sup over the family of |nu_k * f|, each member dilated by its own scale."""

    def job(member: FamilyMember):
        def run() -> np.ndarray:
            y1, y0, w = member.measure.samples()
            factor = member.dilation
            return np.abs(pushforward_average(f, factor * y1, w) - pushforward_average(f, factor * y0, w))
        return run

    labels = [[position] for position in range(len(family))]
    values, argmax = _supremum(f, labels, [job(member) for member in family], workers)
    argmax = argmax[:, 0].astype(np.int64) if family else np.zeros(f.size, dtype=np.int64)
    return MaximalResult("level", f.midpoints, values, argmax)


# ---------------------------------------------------------------------------
# Fourier transform
# ---------------------------------------------------------------------------


def xi_grid(radius: float, lo: float = 1e-3, hi: float = 64.0, points: int = 64) -> np.ndarray:
    """Log-spaced frequencies whose normalized values xi * R span [lo, hi]."""

    if not 0 < lo < hi:
        raise ValueError(f"need 0 < lo < hi, got {lo}, {hi}")
    return np.geomspace(lo, hi, points) / radius


def _transform(y1: np.ndarray, y0: np.ndarray, weights: np.ndarray, xi: np.ndarray) -> np.ndarray:
    """sum_k w_k (e^{-i xi y1_k} - e^{-i xi y0_k}), written as -2i sin(xi d/2) e^{-i xi m}."""

    half_gap = 0.5 * (y1 - y0)
    middle = 0.5 * (y1 + y0)
    out = np.empty(xi.size, dtype=complex)
    chunk = max(1, _CHUNK_ELEMENTS // max(1, y1.size))
    for start in range(0, xi.size, chunk):
        block = xi[start:start + chunk, None]
        terms = np.sin(block * half_gap) * np.exp(-1j * block * middle)
        out[start:start + chunk] = -2j * (terms @ weights)
    return out


@dataclass(frozen=True, eq=False)
class FourierProfile:
    xi: np.ndarray
    values: np.ndarray
    radius: float
    nodes: int
    total_variation: float

    @property
    def magnitude(self) -> np.ndarray:
        return np.abs(self.values)

    @property
    def normalized(self) -> np.ndarray:
        return self.xi * self.radius

    def to_rows(self) -> list[list[str]]:
        return [
            [repr(float(x)), repr(float(u)), repr(float(m))]
            for x, u, m in zip(self.xi, self.normalized, self.magnitude)
        ]


def fourier_transform(
    m: OscMeasure,
    xi: np.ndarray,
    tolerance: float = 0.01,
    max_nodes: int | None = None,
) -> FourierProfile:
    """nu^(xi) = int e^{-i xi x} d nu by direct quadrature over the region.

    Nodes are doubled from ``m.nodes`` until the magnitudes change by less
    than ``tolerance`` (relative, above the noise floor).

    Raises:
        QuadratureError: If the node limit is reached before convergence; carries
            the frequency with the largest relative change.
    """

    xi = np.asarray(xi, dtype=float)
    if m.is_zero:
        return FourierProfile(xi, np.zeros(xi.size, dtype=complex), m.radius, m.nodes, 0.0)
    limit = max_nodes or int(MAX_QUADRATURE_NODES ** (1.0 / m.n))
    nodes = m.nodes
    values = _transform(*m.samples(nodes), xi)
    change = np.zeros(xi.size)
    while True:
        finer_nodes = 2 * nodes
        if finer_nodes > limit:
            worst = float(xi[int(np.argmax(change))]) if xi.size else 0.0
            raise QuadratureError(f"no convergence with {nodes} nodes per axis", worst)
        finer = _transform(*m.samples(finer_nodes), xi)
        floor = max(NOISE_FLOOR, 1e-6 * float(np.max(np.abs(finer), initial=0.0)))
        change = np.abs(np.abs(finer) - np.abs(values)) / np.maximum(np.abs(finer), floor)
        values, nodes = finer, finer_nodes
        if not np.any(change > tolerance):
            break
    logger.debug(f"Fourier transform converged with {nodes} nodes per axis")
    return FourierProfile(xi, values, m.radius, nodes, m.total_variation)


def histogram_transform(m: OscMeasure, xi: np.ndarray) -> np.ndarray:
    """Discrete transform of the histogram density."""

    xi = np.atleast_1d(np.asarray(xi, dtype=float))
    return np.exp(-1j * np.outer(xi, m.centers)) @ (m.density * m.bin_width)


def mean_value_bound(m: OscMeasure, xi: np.ndarray, nodes: int | None = None) -> np.ndarray:
    """|xi| * sum_k w_k |y1_k - y0_k|, a pointwise bound for |nu^(xi)|."""

    y1, y0, weights = m.samples(nodes)
    return np.abs(np.asarray(xi, dtype=float)) * float(np.sum(weights * np.abs(y1 - y0)))


@dataclass(frozen=True)
class DecayFit:
    slope: float
    intercept: float
    r_squared: float
    points: int
    vanishing: bool

    @property
    def constant(self) -> float:
        return math.exp(self.intercept) if not self.vanishing else 0.0


def _regime_bounds(regime) -> tuple[float, float]:
    if regime == "small":
        return SMALL_REGIME
    if regime == "large":
        return LARGE_REGIME
    lo, hi = regime
    return float(lo), float(hi)


def decay_fit(profile: FourierProfile, regime="small", noise_floor: float = NOISE_FLOOR) -> DecayFit:
    """Least-squares slope of log|nu^| against log xi on a normalized regime.

    Raises:
        ValueError: If fewer than 8 frequencies fall in the regime.
    """

    lo, hi = _regime_bounds(regime)
    normalized = profile.normalized
    inside = (normalized >= lo * (1 - 1e-12)) & (normalized <= hi * (1 + 1e-12))
    if int(inside.sum()) < 8:
        raise ValueError(f"need at least 8 frequencies in [{lo}, {hi}], got {int(inside.sum())}")
    magnitude = profile.magnitude[inside]
    usable = magnitude > noise_floor
    if int(usable.sum()) < MIN_FIT_POINTS:
        logger.warning(f"Fourier profile below {noise_floor} on [{lo}, {hi}]: vanishing measure")
        return DecayFit(math.nan, math.nan, math.nan, int(usable.sum()), True)
    fit = linregress(np.log(profile.xi[inside][usable]), np.log(magnitude[usable]))
    return DecayFit(float(fit.slope), float(fit.intercept), float(fit.rvalue ** 2), int(usable.sum()), False)


def decay_order(fit: DecayFit, orders: Sequence[int] = (1, 2, 3)) -> int:
    """Largest m among ``orders`` with slope <= -m; 0 if none."""

    if fit.vanishing:
        return 0
    reached = [m for m in orders if fit.slope <= -m]
    return max(reached, default=0)


def small_xi_constant(profile: FourierProfile) -> float:
    """max |nu^(xi)| / |xi| over the small regime."""

    lo, hi = SMALL_REGIME
    normalized = profile.normalized
    inside = (normalized >= lo * (1 - 1e-12)) & (normalized <= hi * (1 + 1e-12))
    if not inside.any():
        return 0.0
    return float(np.max(profile.magnitude[inside] / profile.xi[inside]))


# ---------------------------------------------------------------------------
# Shift moduli
# ---------------------------------------------------------------------------


def _shift_variation(m: OscMeasure, y: float, exclude_radius: float = 0.0) -> float:
    """int over |x| >= exclude_radius of |nu(x - y) - nu(x)| with nu linear between bin centers."""

    width = m.bin_width
    pad = int(math.ceil(abs(y) / width)) + 1
    original = np.concatenate([np.zeros(pad), m.density, np.zeros(pad)])
    x = m.centers[0] + (np.arange(original.size) - pad) * width
    shifted = np.interp(x - y, m.centers, m.density, left=0.0, right=0.0)
    difference = np.abs(shifted - original)
    if exclude_radius > 0:
        difference = difference[np.abs(x) >= exclude_radius]
    return float(difference.sum() * width)


def l1_modulus(m: OscMeasure, y: float) -> float:
    """int |nu(x - y) - nu(x)| dx from the histogram.

    Raises:
        ResolutionError: If 0 < |y| < 2 bin widths.
    """

    if y == 0 or not np.any(m.density):
        return 0.0
    if abs(y) < 2 * m.bin_width:
        raise ResolutionError(f"shift {y!r} is below two bin widths ({m.bin_width!r}); resolution insufficient")
    return _shift_variation(m, y)


def plancherel_modulus_bound(profile: FourierProfile, m: OscMeasure, y: float) -> float:
    """Cauchy-Schwarz bound sqrt(2 (R + |y|)) * ||nu(. - y) - nu||_2 over the profile's xi range."""

    if profile.xi.size < 2:
        return 0.0
    integrand = 4.0 * np.sin(0.5 * y * profile.xi) ** 2 * profile.magnitude ** 2
    l2_squared = 2.0 * trapezoid(integrand, profile.xi) / (2.0 * math.pi)
    return math.sqrt(2.0 * (m.radius + abs(y))) * math.sqrt(max(l2_squared, 0.0))


@dataclass(frozen=True)
class ShiftedSum:
    total: float
    terms: tuple[float, ...]
    included: int
    excluded: int
    excluded_nonzero: int
    unresolved_terms: int


def _support_extent(m: OscMeasure) -> float:
    nonzero = np.flatnonzero(m.density)
    if nonzero.size == 0:
        return 0.0
    return float(np.max(np.abs(m.centers[nonzero]))) + m.bin_width


def shifted_sum_bound(family: Sequence[FamilyMember], y: float) -> ShiftedSum:
    """sum over the family of int_{|x| >= 2|y|} |nu_k(x - y) - nu_k(x)| dx.

    Members with 2^{-s} R < |y| / 2 are excluded; their support lies inside
    |x| < 2|y| together with its shift, which is re-checked from the histogram.
    """

    terms: list[float] = []
    included = excluded = excluded_nonzero = unresolved = 0
    for member in family:
        m = member.measure
        rescaled = abs(y) / member.dilation
        if member.dilation * m.radius < abs(y) / 2:
            excluded += 1
            if _support_extent(m) >= rescaled:
                excluded_nonzero += 1
            terms.append(0.0)
            continue
        included += 1
        if rescaled < 2 * m.bin_width:
            unresolved += 1
        terms.append(_shift_variation(m, math.copysign(rescaled, y), exclude_radius=2 * rescaled))
    return ShiftedSum(float(sum(terms)), tuple(terms), included, excluded, excluded_nonzero, unresolved)


# ---------------------------------------------------------------------------
# Dilations and restricted measures
# ---------------------------------------------------------------------------


def dilate_measure(m: OscMeasure, s: float) -> OscMeasure:
    """Rebuild with generator and comparison scaled by 2^{-s}; same nodes and bin count."""

    factor = 2.0 ** (-float(s))
    bins_log2 = int(round(math.log2((m.edges.size - 1) / 2)))
    return measure_from_polynomials(
        m.generator.scaled(factor), m.comparison.scaled(factor), m.region, m.nodes, bins_log2,
        {**m.label, "dilation": float(s)},
    )


def dilation_defect(m: OscMeasure, s: float) -> float:
    """Relative L1 deviation of the rebuilt nu_s from 2^s nu(2^s x)."""

    dilated = dilate_measure(m, s)
    factor = 2.0 ** float(s)
    expected = factor * np.interp(factor * dilated.centers, m.centers, m.density, left=0.0, right=0.0)
    scale = m.total_variation
    if scale == 0:
        return float(np.abs(dilated.density).sum() * dilated.bin_width)
    return float(np.abs(dilated.density - expected).sum() * dilated.bin_width / scale)


@dataclass(frozen=True)
class VariationBound:
    total_variation: float
    weight_bound: float
    volume_bound: float

    @property
    def holds(self) -> bool:
        slack = 1e-12 * max(1.0, self.weight_bound)
        return self.total_variation <= self.weight_bound + slack and self.weight_bound <= self.volume_bound + slack


def restricted_variation_bound(m: OscMeasure) -> VariationBound:
    """TV(nu restricted) <= 2 int_region prod eta <= 2 |region|."""

    return VariationBound(m.total_variation, 2.0 * m.region_weight, 2.0 * m.region_volume)


# ---------------------------------------------------------------------------
# Sublevel sets
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class SublevelCurve:
    levels: np.ndarray
    thresholds: np.ndarray
    grid_measure: np.ndarray
    monte_carlo_measure: np.ndarray
    exponent: float | None
    r_squared: float | None

    def to_rows(self) -> list[list[str]]:
        return [
            [repr(float(a)), repr(float(s)), repr(float(g)), repr(float(mc))]
            for a, s, g, mc in zip(self.levels, self.thresholds, self.grid_measure, self.monte_carlo_measure)
        ]


def sublevel_measure(
    p0: Polynomial,
    theta: Fraction | float,
    levels: Sequence[float],
    grid_nodes: int | None = None,
    samples: int = 100_000,
    seed: int = 0,
) -> SublevelCurve:
    """|{t in [1/2, 4]^n : |grad P0(t)| <= 2^{-theta a}}| for each level a, with a log-log fit."""

    if not float(theta) > 0:
        raise ValueError(f"theta must be positive, got {theta}")
    n = p0.n
    levels = np.asarray(levels, dtype=float)
    thresholds = 2.0 ** (-float(theta) * levels)
    nodes = grid_nodes or min(2 ** 14, int(2 ** (21 / n)))
    axis, widths = midpoint_rule(ETA_LO, ETA_HI, nodes)
    points, cells = tensor_rule([axis] * n, [widths] * n)
    grid_norm = np.linalg.norm(p0.gradient(points), axis=-1)
    rng = np.random.default_rng(seed)
    random_points = rng.uniform(ETA_LO, ETA_HI, size=(samples, n))
    random_norm = np.linalg.norm(p0.gradient(random_points), axis=-1)
    volume = (ETA_HI - ETA_LO) ** n

    grid_measure = np.array([float(cells[grid_norm <= s].sum()) for s in thresholds])
    mc_measure = np.array([volume * float(np.mean(random_norm <= s)) for s in thresholds])

    positive = grid_measure > 0
    exponent = r_squared = None
    if int(positive.sum()) >= 2:
        fit = linregress(np.log(thresholds[positive]), np.log(grid_measure[positive]))
        exponent, r_squared = float(fit.slope), float(fit.rvalue ** 2)
    return SublevelCurve(levels, thresholds, grid_measure, mc_measure, exponent, r_squared)


# ---------------------------------------------------------------------------
# k0 search
# ---------------------------------------------------------------------------


def find_k0(
    p: Polynomial,
    diagram: NewtonDiagram,
    j: int,
    level: int = 0,
    k_range: Sequence[int] = range(0, 9),
    nodes: int = 48,
    bins_log2: int = 10,
    xi_points: int = 64,
) -> int | None:
    """Smallest k whose measure at offsets (k, ..., k) has large-xi slope <= -1."""

    data = diagram.vertex(j)
    for k in k_range:
        if data.zero_coords:
            index = AxisIndex((k,) * len(data.axis_slots), (0,) * len(data.b_slots))
        else:
            index = SlotIndex(0, level, (k,) * (diagram.n - 1))
        try:
            m = build_measure(p, diagram, j, index, nodes=nodes, bins_log2=bins_log2)
        except DiagramError:
            continue
        if m.is_zero:
            continue
        profile = fourier_transform(m, xi_grid(m.radius, 1e-3, LARGE_REGIME[1], xi_points))
        fit = decay_fit(profile, "large")
        if not fit.vanishing and fit.slope <= -1:
            return k
    return None
