"""Verification suites run by the command line.

Each suite reads an :class:`ExperimentConfig`, records measured constants and
violations in a shared :class:`VerificationReport`, and writes CSV tables and
SVG plots into the output directory.
"""

from __future__ import annotations

import csv
import json
import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from newton_maximal.config import ExperimentConfig
from newton_maximal.cz import cz_decompose, cz_verify
from newton_maximal.diagram import NewtonDiagram, build_diagram, verify_partition
from newton_maximal.errors import DiagramError, NewtonMaximalError, QuadratureError
from newton_maximal.grid import EtaWindow, GridSpec
from newton_maximal.maximal import (
    comparison_recursive,
    cone_split,
    hardy_littlewood,
    maximal_cone_restricted,
    maximal_continuous,
    maximal_dyadic,
    monomial_domination_check,
    truncation_defect,
)
from newton_maximal.oscillatory import (
    AxisIndex,
    SlotIndex,
    build_measure,
    decay_fit,
    decay_order,
    dilation_defect,
    find_k0,
    fourier_transform,
    histogram_transform,
    l1_modulus,
    mean_value_bound,
    measure_family,
    plancherel_modulus_bound,
    restricted_variation_bound,
    shifted_sum_bound,
    small_xi_constant,
    sublevel_measure,
    xi_grid,
)
from newton_maximal.polynomial import Polynomial, parse_polynomial
from newton_maximal.report import VerificationReport
from newton_maximal.svg import line_plot
from newton_maximal.weak_type import (
    OperatorSettings,
    SweepSettings,
    default_corpus,
    distribution_function,
    indicator_function,
    stability_sweep,
    weak_type_profile,
)

logger = logging.getLogger(__name__)

# Fixed polynomial corpus for the partition suite: (text, n).
PARTITION_CORPUS: tuple[tuple[str, int], ...] = (
    ("t1^2*t2 + t1*t2^3", 2),
    ("t1^2 + t2^3", 2),
    ("t1^2 + t1*t2", 2),
    ("t1^3 + t1*t2 + t2^3", 2),
    ("t1^4 + t1^2*t2 + t2^3", 2),
    ("t1*t2^2 + t1^3*t2", 2),
    ("t1^5 + t1^2*t2^2 + t2^5", 2),
    ("1 + t1*t2", 2),
    ("t1^2 + t2^2 + t3^2", 3),
    ("t1*t2*t3", 3),
    ("t1 + t2*t3", 3),
    ("t1^2 + t2 + t3^3", 3),
)

MONOMIALS: tuple[tuple[str, int], ...] = (
    ("t1", 1),
    ("t1^2", 1),
    ("t1^3", 1),
    ("t1*t2", 2),
    ("t1^2*t2", 2),
    ("t1*t2^2", 2),
)
MONOMIAL_FUNCTIONS = 10

# Random (P, f) pairs for the operator comparisons; P is drawn from the planar part of PARTITION_CORPUS.
MAXIMAL_PAIRS = 20

# Polynomials with critical points in [1/2, 4]^n, with the exact sublevel exponent when known.
SUBLEVEL_CORPUS: tuple[tuple[str, int, float | None], ...] = (
    ("t1^2 - 4*t1 + 5", 1, 1.0),
    ("t1^3 - 6*t1^2 + 12*t1", 1, 0.5),
    ("t1^2 - 4*t1", 2, 1.0),
    ("t1^2 - 4*t1 + t2^2 - 4*t2", 2, 2.0),
    ("t1*t2 - 2*t1 - 2*t2", 2, None),
    ("t1^3 - 6*t1^2 + 12*t1 + t2^2 - 4*t2", 2, None),
)
SUBLEVEL_LEVELS = tuple(range(4, 25, 2))

DILATION_SAMPLES = 20


@dataclass
class SuiteContext:
    config: ExperimentConfig
    polynomial: Polynomial
    diagram: NewtonDiagram | None
    report: VerificationReport
    out: Path

    @property
    def grid(self) -> GridSpec:
        return GridSpec(self.config.x_min, self.config.x_max, self.config.dx_log2)

    @property
    def name(self) -> str:
        return self.polynomial.to_text()

    def write_csv(self, filename: str, header: Sequence[str], rows: Sequence[Sequence]) -> Path:
        path = self.out / filename
        with open(path, "w", newline="", encoding="utf-8") as handle:
            writer = csv.writer(handle)
            writer.writerow(header)
            writer.writerows(rows)
        self.report.add_artifact(filename)
        logger.info(f"Wrote {path}")
        return path

    def plot(self, filename: str, series, title: str, x_label: str, y_label: str, **axes) -> None:
        line_plot(series, self.out / filename, title, x_label, y_label, **axes)
        self.report.add_artifact(filename)

    def error(self, suite: str, check: str, description: str, expected: str = "", actual: str = "", location: str = "") -> None:
        self.report.add_violation(suite, check, "error", description, expected, actual, location or self.name)

    def warning(self, suite: str, check: str, description: str, expected: str = "", actual: str = "", location: str = "") -> None:
        self.report.add_violation(suite, check, "warning", description, expected, actual, location or self.name)


# ---------------------------------------------------------------------------
# diagram / partition
# ---------------------------------------------------------------------------


def run_diagram(ctx: SuiteContext) -> None:
    suite = "diagram"
    ctx.report.add_suite(suite)
    if ctx.diagram is None:
        ctx.error(suite, "construction", "Newton diagram could not be built")
        return
    dump = ctx.diagram.to_dict()
    with open(ctx.out / "diagram.json", "w", encoding="utf-8") as handle:
        json.dump(dump, handle, indent=2, sort_keys=True)
        handle.write("\n")
    ctx.report.add_artifact("diagram.json")
    ctx.report.record(suite, ctx.name, dump)
    for data in ctx.diagram.vertices:
        if not data.beta > 0:
            ctx.error(suite, "beta", f"beta at {list(data.vertex)} is not positive", "> 0", str(data.beta))
    rows = [
        [str(j), " ".join(map(str, data.vertex)), ";".join(" ".join(map(str, v)) for v in data.normals),
         str(data.denominator), str(data.beta), str(data.c_exponent)]
        for j, data in enumerate(ctx.diagram.vertices)
    ]
    ctx.write_csv("diagram.csv", ["vertex", "exponent", "normals", "d", "beta", "c_exponent"], rows)


def run_partition(ctx: SuiteContext) -> None:
    suite = "partition"
    ctx.report.add_suite(suite)
    corpus = [(ctx.name, ctx.config.n)] + [item for item in PARTITION_CORPUS if item != (ctx.name, ctx.config.n)]
    rows = []
    for text, n in corpus:
        try:
            diagram = ctx.diagram if text == ctx.name and n == ctx.config.n else build_diagram(parse_polynomial(text, n))
        except NewtonMaximalError as exc:
            ctx.error(suite, "construction", f"diagram failed: {exc}", location=text)
            continue
        if diagram is None:
            continue
        before = len(ctx.report.get_violations_by_suite(suite))
        verify_partition(diagram, ctx.config.qmax, ctx.report, suite)
        found = len(ctx.report.get_violations_by_suite(suite)) - before
        rows.append([text, str(n), str(len(diagram.vertices)), str(ctx.config.qmax), str(found)])
    ctx.write_csv("partition.csv", ["polynomial", "n", "vertices", "q_max", "violations"], rows)


# ---------------------------------------------------------------------------
# monomial / maximal
# ---------------------------------------------------------------------------


def run_monomial(ctx: SuiteContext) -> None:
    suite = "monomial"
    ctx.report.add_suite(suite)
    cfg = ctx.config
    corpus = default_corpus(ctx.grid, MONOMIAL_FUNCTIONS, cfg.seed)
    monomials = [parse_polynomial(text, n) for text, n in MONOMIALS]
    if ctx.polynomial.is_monomial and ctx.polynomial.degree > 0 and ctx.polynomial.terms[0][1] > 0 and ctx.name not in {m.to_text() for m in monomials}:
        monomials.append(ctx.polynomial)
    for tf in corpus:
        reference = hardy_littlewood(tf.function)
        for monomial in monomials:
            monomial_domination_check(tf.function, monomial, cfg.h_grid_size, cfg.quadrature_order,
                                      cfg.monomial_tolerance, ctx.report, suite, reference)

    # Closed form for P = t and f = 1_[0, 1): |{M f > alpha}| = 2 - alpha, W -> 1.
    indicator = indicator_function(0.0, 1.0, ctx.grid).function
    line = parse_polynomial("t1", 1)
    result = maximal_continuous(indicator, line, cfg.h_grid_size, cfg.quadrature_order, cfg.workers)
    profile = weak_type_profile(result, indicator, cfg.alpha_points, cfg.alpha_lo, cfg.alpha_hi)
    half = float(distribution_function(result, np.array([0.5]))[0])
    ctx.report.record(suite, "t1|indicator", {"W": profile.value, "measure_at_half": half})
    if abs(profile.value - 1.0) > 0.02:
        ctx.error(suite, "closed_form_w", "W for P = t and f = 1_[0,1) differs from 1", "1.00 +- 0.02", repr(profile.value), "t1")
    if abs(half - 1.5) > 2 * ctx.grid.dx + 1e-12:
        ctx.error(suite, "closed_form_distribution", "|{M f > 1/2}| differs from 3/2", "1.5", repr(half), "t1")
    rows = [[repr(float(a)), repr(float(m))] for a, m in zip(profile.alphas, profile.measures)]
    ctx.write_csv("monomial_closed_form.csv", ["alpha", "measure"], rows)
    ctx.plot("monomial_closed_form.svg", {"measured": (profile.alphas, profile.measures),
                                          "2 - alpha": (profile.alphas, np.clip(2.0 - profile.alphas, 0.0, None))},
             "Distribution function, P = t, f = 1_[0,1)", "alpha", "measure", log_x=True, log_y=False)


def _eta_qmax(cfg: ExperimentConfig) -> int:
    """Deep enough that the eta windows reach below the grid step."""

    return max(cfg.dyadic_qmax, cfg.dx_log2 + 2)


def _compare_operators(ctx: SuiteContext, suite: str, p: Polynomial, f, window: EtaWindow, location: str):
    """Check dyadic <= 2^n continuous and continuous <= 4^n eta pointwise; return (continuous, eta, measurements)."""

    cfg = ctx.config
    continuous = maximal_continuous(f, p, cfg.h_grid_size, cfg.quadrature_order, cfg.workers)
    comparable = min(cfg.dyadic_qmax, cfg.h_grid_size + 1)
    dyadic = maximal_dyadic(f, p, comparable, cfg.quadrature_order, min_level=1, workers=cfg.workers)
    smoothed = maximal_dyadic(f, p, _eta_qmax(cfg), smoothed=True, window=window, workers=cfg.workers)

    bound = 2.0 ** p.n * continuous.values
    slack = cfg.monomial_tolerance * float(np.max(bound, initial=0.0))
    excess = float(np.max(dyadic.values - bound, initial=0.0))
    if excess > slack:
        ctx.error(suite, "dyadic_vs_continuous", "dyadic sup exceeds 2^n times the continuous sup",
                  f"<= {slack!r}", repr(excess), location)

    bound = 4.0 ** p.n * smoothed.values
    slack = cfg.monomial_tolerance * float(np.max(bound, initial=0.0))
    eta_excess = float(np.max(continuous.values - bound, initial=0.0))
    if eta_excess > slack:
        ctx.error(suite, "continuous_vs_eta", "continuous sup exceeds 4^n times the eta sup",
                  f"<= {slack!r}", repr(eta_excess), location)

    measurements = {"continuous_sup": float(continuous.values.max()), "dyadic_excess": excess, "eta_excess": eta_excess}
    return continuous, smoothed, measurements


def run_maximal(ctx: SuiteContext) -> None:
    suite = "maximal"
    ctx.report.add_suite(suite)
    cfg, p = ctx.config, ctx.polynomial
    window = EtaWindow(cfg.eta_nodes)
    corpus = default_corpus(ctx.grid, 3, cfg.seed)
    for position, tf in enumerate(corpus):
        f = tf.function
        location = f"{ctx.name} | {tf.name}"
        continuous, smoothed, measurements = _compare_operators(ctx, suite, p, f, window, location)
        if cfg.dyadic_qmax >= 3:
            measurements["truncation_defect"] = truncation_defect(f, p, cfg.dyadic_qmax, window)

        if ctx.diagram is not None:
            if _eta_qmax(cfg) != cfg.dyadic_qmax:
                smoothed = maximal_dyadic(f, p, cfg.dyadic_qmax, smoothed=True, window=window, workers=cfg.workers)
            pieces = [maximal_cone_restricted(f, p, ctx.diagram, j, cfg.dyadic_qmax, window, cfg.workers)
                      for j in range(len(ctx.diagram.vertices))]
            total = np.sum([piece.values for piece in pieces], axis=0)
            gap = float(np.max(smoothed.values - total, initial=0.0))
            if gap > 1e-12 * max(1.0, float(smoothed.values.max(initial=0.0))):
                ctx.error(suite, "cone_domination", "eta sup exceeds the sum of the cone pieces", "<= 0", repr(gap), location)
            alphas = np.geomspace(1e-3, 1.5, cfg.alpha_points) * max(float(total.max(initial=0.0)), 1e-300)
            measurements["distribution_whole"] = distribution_function(smoothed, alphas).tolist()
            measurements["distribution_pieces"] = distribution_function(total, alphas, f.dx).tolist()
            for j, piece in enumerate(pieces):
                split = cone_split(f, ctx.diagram, j, cfg.dyadic_qmax, window)
                triangle = float(np.max(piece.values - split.main.values - split.comparison.values, initial=0.0))
                if triangle > 1e-12 * max(1.0, float(piece.values.max(initial=0.0))):
                    ctx.error(suite, "cone_split", f"cone piece {j} exceeds main + comparison", "<= 0", repr(triangle), location)
                recursive = comparison_recursive(f, ctx.diagram, j, cfg.dyadic_qmax, window)
                scale = max(1.0, float(split.comparison.values.max(initial=0.0)))
                mismatch = float(np.max(np.abs(recursive.values - split.comparison.values), initial=0.0))
                if mismatch > 1e-9 * scale:
                    ctx.error(suite, "comparison_recursion", f"recursive comparison at vertex {j} disagrees with the direct sup",
                              "<= 1e-9", repr(mismatch / scale), location)
                measurements[f"vertex_{j}_main_sup"] = float(split.main.values.max())
        ctx.report.record(suite, location, measurements)

        if position == 0:
            rows = [[repr(float(x)), repr(float(a)), repr(float(b)), repr(float(c))]
                    for x, a, b, c in zip(f.midpoints, continuous.values, smoothed.values, f.values)]
            ctx.write_csv("maximal.csv", ["x", "continuous", "eta", "f"], rows)
            ctx.plot("maximal.svg", {"continuous": (f.midpoints, continuous.values), "eta": (f.midpoints, smoothed.values),
                                     "f": (f.midpoints, f.values)},
                     f"Maximal functions, P = {ctx.name}", "x", "value", log_x=False, log_y=False)

    candidates = [(text, n) for text, n in PARTITION_CORPUS if n <= 2]
    functions = default_corpus(ctx.grid, MAXIMAL_PAIRS, cfg.seed)
    rng = np.random.default_rng(cfg.seed)
    rows = []
    for pair in range(MAXIMAL_PAIRS):
        text, n = candidates[int(rng.integers(len(candidates)))]
        tf = functions[int(rng.integers(len(functions)))]
        location = f"pair {pair} | {text} | {tf.name}"
        _, _, measurements = _compare_operators(ctx, suite, parse_polynomial(text, n), tf.function, window, location)
        ctx.report.record(suite, location, measurements)
        rows.append([str(pair), text, tf.name, repr(measurements["dyadic_excess"]), repr(measurements["eta_excess"])])
    ctx.write_csv("maximal_pairs.csv", ["pair", "polynomial", "function", "dyadic_excess", "eta_excess"], rows)


# ---------------------------------------------------------------------------
# cz
# ---------------------------------------------------------------------------


def run_cz(ctx: SuiteContext) -> None:
    suite = "cz"
    ctx.report.add_suite(suite)
    cfg = ctx.config
    grid = ctx.grid
    rng = np.random.default_rng(cfg.seed)
    corpus = default_corpus(grid, min(cfg.cases, 50), cfg.seed)
    rows = []
    for case in range(cfg.cases):
        f = corpus[case % len(corpus)].function
        lowest = max(cfg.lambda_min, f.mass / (grid.x_hi - grid.x_lo))
        highest = max(cfg.lambda_max, lowest)
        level = float(math.exp(rng.uniform(math.log(lowest), math.log(highest))))
        result = cz_decompose(f, level, cfg.amplification)
        cz_verify(result, f, ctx.report, suite)
        energy = float(np.sum(result.good.values ** 2) * f.dx)
        rows.append([str(case), repr(level), str(len(result.cubes)), repr(result.omega_measure),
                     repr(f.mass / result.threshold), repr(energy / (2 * result.threshold * f.mass))])
    ctx.write_csv("cz.csv", ["case", "level", "cubes", "omega", "omega_bound", "energy_ratio"], rows)


# ---------------------------------------------------------------------------
# oscillatory
# ---------------------------------------------------------------------------


def _profile_row(j: int, level: int, small, large, constant: float, order: int) -> list[str]:
    return [str(j), str(level), repr(small.slope), repr(small.r_squared), repr(large.slope),
            repr(large.r_squared), repr(constant), str(order)]


def run_oscillatory(ctx: SuiteContext) -> None:
    suite = "oscillatory"
    ctx.report.add_suite(suite)
    cfg, p, diagram = ctx.config, ctx.polynomial, ctx.diagram
    if diagram is None:
        ctx.error(suite, "construction", "Newton diagram could not be built")
        return
    rng = np.random.default_rng(cfg.seed)
    levels = list(range(cfg.n_min, cfg.n_max + 1))
    fit_rows, profile_rows, modulus_rows, sum_rows = [], [], [], []
    profile_series = {}

    for j, data in enumerate(diagram.vertices):
        location = f"{ctx.name} | vertex {list(data.vertex)}"
        constants, moduli = [], []
        for level in levels:
            index = SlotIndex(0, level, (0,) * (diagram.n - 1))
            try:
                m = build_measure(p, diagram, j, index, nodes=cfg.measure_nodes, bins_log2=cfg.bins_log2)
            except DiagramError:
                continue
            if abs(m.mass) > 1e-10:
                ctx.error(suite, "mass", "measure does not integrate to zero", "<= 1e-10", repr(m.mass), location)
            if m.outside_mass != 0:
                ctx.error(suite, "support", "pushforward mass outside [-R, R]", "0", repr(m.outside_mass), location)
            if m.is_zero:
                ctx.report.add_violation(suite, "vanishing", "info", f"measure vanishes at N={level}", location=location)
                continue
            xi = xi_grid(m.radius, cfg.xi_min, cfg.xi_max, cfg.xi_points)
            try:
                profile = fourier_transform(m, xi)
            except QuadratureError as exc:
                ctx.error(suite, "quadrature", str(exc), actual=repr(exc.xi), location=location)
                continue
            _check_profile(ctx, suite, m, profile, location)
            small, large = decay_fit(profile, "small"), decay_fit(profile, "large")
            constant = small_xi_constant(profile)
            constants.append((level, constant))
            fit_rows.append(_profile_row(j, level, small, large, constant, decay_order(large)))
            profile_rows.extend([str(j), str(level), *row] for row in profile.to_rows())
            profile_series[f"v{j} N={level}"] = (profile.xi, profile.magnitude)
            if level >= 3 and not small.vanishing and not 0.9 <= small.slope <= 1.1:
                ctx.error(suite, "small_xi_slope", f"small-xi slope at N={level} outside [0.9, 1.1]",
                          "[0.9, 1.1]", repr(small.slope), location)
            if not large.vanishing:
                if large.r_squared >= 0.95 and large.slope > -0.4:
                    ctx.error(suite, "large_xi_slope", f"large-xi slope at N={level} above -0.4", "<= -0.4",
                              repr(large.slope), location)
                elif large.r_squared < 0.95:
                    ctx.warning(suite, "large_xi_fit", f"large-xi fit at N={level} has R^2 below 0.95",
                                ">= 0.95", repr(large.r_squared), location)

            for exponent in range(2, 9):
                y = m.radius * 2.0 ** (-exponent)
                value = l1_modulus(m, y)
                moduli.append((level, math.log2(y), value))
                modulus_rows.append([str(j), str(level), repr(y), repr(value),
                                     repr(plancherel_modulus_bound(profile, m, y))])

        _fit_constants(ctx, suite, data, constants, location)
        _fit_moduli(ctx, suite, moduli, location)
        sum_rows.extend(_shifted_sums(ctx, suite, j, levels, location))
        _dilations(ctx, suite, j, levels, rng, location)
        if data.zero_coords and data.gamma is not None:
            _restricted(ctx, suite, j, location)
        ctx.report.record(suite, f"{location} | k0", find_k0(p, diagram, j, level=levels[0], nodes=cfg.measure_nodes,
                                                             bins_log2=min(cfg.bins_log2, 10)))

    _sublevel(ctx, suite)
    ctx.write_csv("oscillatory_fits.csv", ["vertex", "N", "small_slope", "small_r2", "large_slope", "large_r2",
                                           "small_constant", "decay_order"], fit_rows)
    ctx.write_csv("oscillatory_profiles.csv", ["vertex", "N", "xi", "xi_normalized", "magnitude"], profile_rows)
    ctx.write_csv("oscillatory_moduli.csv", ["vertex", "N", "y", "l1_modulus", "plancherel_bound"], modulus_rows)
    ctx.write_csv("oscillatory_shifted_sums.csv", ["vertex", "N", "y", "sum", "included", "excluded", "unresolved"], sum_rows)
    ctx.plot("oscillatory_profiles.svg", profile_series, f"|Fourier transform|, P = {ctx.name}", "xi", "|nu^(xi)|")


def _check_profile(ctx: SuiteContext, suite: str, m, profile, location: str) -> None:
    magnitude = profile.magnitude
    variation_bound = 2.0 * m.region_weight
    if float(magnitude.max(initial=0.0)) > variation_bound * (1 + 1e-9):
        ctx.error(suite, "variation_bound", "|nu^| exceeds the total variation bound", f"<= {variation_bound!r}",
                  repr(float(magnitude.max())), location)
    bound = mean_value_bound(m, profile.xi, profile.nodes)
    if np.any(magnitude > bound * (1 + 1e-9) + 1e-15):
        ctx.error(suite, "mean_value", "|nu^(xi)| exceeds |xi| times the mean displacement", location=location)
    resolved = profile.xi <= 1.0 / (8.0 * m.bin_width)
    if resolved.any():
        histogram = np.abs(histogram_transform(m, profile.xi[resolved]))
        direct = magnitude[resolved]
        significant = direct > 1e-3 * float(direct.max(initial=0.0))
        if significant.any():
            deviation = float(np.max(np.abs(histogram[significant] - direct[significant]) / direct[significant]))
            ctx.report.record(suite, f"{location} | histogram_deviation | R={m.radius!r}", deviation)
            if deviation > 0.02:
                ctx.warning(suite, "histogram_consistency", "histogram transform deviates by more than 2%",
                            "<= 0.02", repr(deviation), location)


def _fit_constants(ctx, suite, data, constants, location) -> None:
    usable = [(level, c) for level, c in constants if c > 0]
    if len(usable) < 2:
        return
    slope = float(np.polyfit([level for level, _ in usable], np.log2([c for _, c in usable]), 1)[0])
    rate = -slope
    ctx.report.record(suite, f"{location} | small_constant_rate", rate)
    if rate < 0.5 * float(data.beta):
        ctx.error(suite, "small_constant_rate", "small-xi constant decays slower than beta / 2",
                  f">= {0.5 * float(data.beta)!r}", repr(rate), location)


def _fit_moduli(ctx, suite, moduli, location) -> None:
    usable = [(level, log_y, value) for level, log_y, value in moduli if value > 0]
    if len(usable) < 3:
        return
    design = np.array([[1.0, level, log_y] for level, log_y, _ in usable])
    target = np.log2([value for *_, value in usable])
    coefficients, *_ = np.linalg.lstsq(design, target, rcond=None)
    delta, delta_2 = -float(coefficients[1]), float(coefficients[2])
    ctx.report.record(suite, f"{location} | l1_modulus_fit",
                      {"A": 2.0 ** float(coefficients[0]), "delta": delta, "delta_2": delta_2})
    if not (delta > 0 and delta_2 > 0):
        ctx.warning(suite, "l1_modulus_fit", "L1 modulus fit has a nonpositive exponent", "> 0",
                    repr((delta, delta_2)), location)


def _shifted_sums(ctx, suite, j, levels, location) -> list[list[str]]:
    cfg, p, diagram = ctx.config, ctx.polynomial, ctx.diagram
    rows, totals = [], []
    for level in levels:
        family = measure_family(p, diagram, j, level=level, k_max=cfg.k_max, nodes=cfg.measure_nodes,
                                bins_log2=cfg.bins_log2)
        if not family:
            continue
        radius = max(member.measure.radius for member in family)
        y = radius * 2.0 ** -6
        result = shifted_sum_bound(family, y)
        if result.excluded_nonzero:
            ctx.error(suite, "excluded_terms", f"{result.excluded_nonzero} excluded term(s) have support beyond the shift",
                      "0", str(result.excluded_nonzero), location)
        far = shifted_sum_bound(family, 4.0 * radius)
        if far.total != 0 or far.included:
            ctx.error(suite, "far_shift", "shift beyond 2R leaves surviving terms", "0", repr(far.total), location)
        totals.append(result.total)
        rows.append([str(j), str(level), repr(y), repr(result.total), str(result.included), str(result.excluded),
                     str(result.unresolved_terms)])
    if len(totals) > 1 and any(b > a * 1.1 for a, b in zip(totals, totals[1:])):
        ctx.warning(suite, "shifted_sum_monotone", "shifted sum increases with N beyond fit noise", location=location)
    return rows


def _dilations(ctx, suite, j, levels, rng, location) -> None:
    cfg, p, diagram = ctx.config, ctx.polynomial, ctx.diagram
    defects = []
    for _ in range(DILATION_SAMPLES):
        level = int(rng.choice(levels))
        offsets = tuple(int(k) for k in rng.integers(0, cfg.k_max + 1, size=diagram.n - 1))
        index = SlotIndex(0, level, offsets)
        try:
            m = build_measure(p, diagram, j, index, nodes=min(cfg.measure_nodes, 24), bins_log2=min(cfg.bins_log2, 12))
        except DiagramError:
            continue
        scale = index.scale(diagram, j) or Fraction(1)
        defects.append(dilation_defect(m, float(scale)))
    worst = max(defects, default=0.0)
    ctx.report.record(suite, f"{location} | dilation_defect", worst)
    if worst > 0.05:
        ctx.error(suite, "dilation", "dilated histogram deviates from 2^s nu(2^s x)", "<= 0.05", repr(worst), location)


def _restricted(ctx, suite, j, location) -> None:
    cfg, p, diagram = ctx.config, ctx.polynomial, ctx.diagram
    data = diagram.vertex(j)
    variations = {}
    for k in range(cfg.k_max + 1):
        index = AxisIndex((k,) * len(data.axis_slots), (0,) * len(data.b_slots))
        for region in ("I_theta", "I_theta_c"):
            try:
                m = build_measure(p, diagram, j, index, region, cfg.theta, cfg.measure_nodes, cfg.bins_log2)
            except DiagramError:
                continue
            bound = restricted_variation_bound(m)
            variations[f"{region} k={k}"] = bound.total_variation
            if not bound.holds:
                ctx.error(suite, "restricted_variation", f"TV bound fails on {region} at k={k}",
                          repr(bound.weight_bound), repr(bound.total_variation), location)
    ctx.report.record(suite, f"{location} | restricted_variation", variations)


def _sublevel(ctx, suite) -> None:
    cfg = ctx.config
    rows, series = [], {}
    for text, n, exact in SUBLEVEL_CORPUS:
        p0 = parse_polynomial(text, n)
        curve = sublevel_measure(p0, cfg.theta, SUBLEVEL_LEVELS, seed=cfg.seed)
        ctx.report.record(suite, f"sublevel | {text}", {"exponent": curve.exponent, "r_squared": curve.r_squared})
        rows.extend([text, *row] for row in curve.to_rows())
        series[text] = (curve.thresholds, curve.grid_measure)
        if curve.exponent is None:
            ctx.warning(suite, "sublevel_fit", "sublevel sets are empty on the ladder", location=text)
            continue
        if not (curve.exponent > 0 and curve.r_squared >= 0.9):
            ctx.error(suite, "sublevel_fit", "sublevel exponent not positive with R^2 >= 0.9", "> 0",
                      repr((curve.exponent, curve.r_squared)), text)
        if exact is not None and abs(curve.exponent - exact) > 0.1 * exact:
            ctx.error(suite, "sublevel_closed_form", "sublevel exponent differs from the closed form",
                      repr(exact), repr(curve.exponent), text)
    ctx.write_csv("sublevel.csv", ["polynomial", "level", "s", "grid_measure", "monte_carlo_measure"], rows)
    ctx.plot("sublevel.svg", series, "Sublevel set measure", "s", "|{|grad P0| <= s}|")


# ---------------------------------------------------------------------------
# weaktype
# ---------------------------------------------------------------------------


def run_weaktype(ctx: SuiteContext) -> None:
    suite = "weaktype"
    ctx.report.add_suite(suite)
    cfg = ctx.config
    if ctx.diagram is None:
        ctx.error(suite, "construction", "Newton diagram could not be built")
        return
    settings = SweepSettings(
        operator=OperatorSettings("continuous", cfg.h_grid_size, cfg.dyadic_qmax, cfg.quadrature_order,
                                  cfg.eta_nodes, cfg.workers),
        levels=tuple(range(cfg.n_min, cfg.n_max + 1)),
        k_max=cfg.k_max,
        measure_nodes=cfg.weak_nodes,
        alpha_points=cfg.alpha_points,
        alpha_lo=cfg.alpha_lo,
        alpha_hi=cfg.alpha_hi,
        tolerance=cfg.stability_tolerance,
    )
    corpus = default_corpus(ctx.grid, cfg.corpus_size, cfg.seed)
    result = stability_sweep(ctx.polynomial, corpus, settings, ctx.diagram, ctx.report, suite)

    ctx.write_csv("weak_type.csv", ["vertex", "N", "W", "fit_delta"], result.level_rows())
    ctx.write_csv("weak_type_corpus.csv", ["function", "W"], [[name, repr(w)] for name, w in result.corpus.items()])
    ctx.write_csv("weak_type_delta.csv", ["width", "W"], [[repr(w), repr(v)] for w, v in result.delta_curve])
    ctx.write_csv("weak_type_axis.csv", ["vertex", "k", "W"],
                  [[str(j), " ".join(map(str, k)), repr(w)] for j, k, w in result.axis])

    series = {}
    for j in sorted({row[0] for row in result.levels}):
        points = {}
        for vertex, _, level, w in result.levels:
            if vertex == j:
                points[level] = max(points.get(level, 0.0), w)
        series[f"vertex {j}"] = (list(points), list(points.values()))
    ctx.plot("weak_type_levels.svg", series, f"Weak functional of level pieces, P = {ctx.name}", "N", "W",
             log_x=False, log_y=True)
    axis_series = {}
    for j, k, w in result.axis:
        xs, ys = axis_series.setdefault(f"vertex {j}", ([], []))
        xs.append(float(sum(k)))
        ys.append(w)
    if axis_series:
        ctx.plot("weak_type_axis.svg", axis_series, "Weak functional of axis pieces", "|k|", "W", log_x=False, log_y=True)


SUITE_RUNNERS: dict[str, Callable[[SuiteContext], None]] = {
    "diagram": run_diagram,
    "partition": run_partition,
    "monomial": run_monomial,
    "maximal": run_maximal,
    "cz": run_cz,
    "oscillatory": run_oscillatory,
    "weaktype": run_weaktype,
}


def run_experiment(config: ExperimentConfig) -> VerificationReport:
    """Run the configured suites and write every artifact into ``config.out``.

    Raises:
        PolynomialSyntaxError: If the configured polynomial does not parse.
    """

    p = parse_polynomial(config.poly, config.n)
    out = Path(config.out)
    out.mkdir(parents=True, exist_ok=True)
    report = VerificationReport()
    try:
        diagram = build_diagram(p)
    except DiagramError as exc:
        logger.error(f"Newton diagram of {p.to_text()} failed: {exc}")
        diagram = None
    ctx = SuiteContext(config, p, diagram, report, out)
    for suite in config.suites:
        logger.info(f"Suite {suite}: start")
        SUITE_RUNNERS[suite](ctx)
        count = len(report.get_violations_by_suite(suite))
        logger.info(f"Suite {suite}: done, {count} violation(s)")
    report.record("experiment", "config", config.to_dict())
    emit_report(report, out)
    return report


def emit_report(report: VerificationReport, out: Path) -> list[Path]:
    """Write report.json, report.md, report.txt and index.json; contents depend only on the report."""

    if not report.suites_run:
        raise ValueError("no suites were run")
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    report.add_artifact("report.json")
    report.add_artifact("report.md")
    report.add_artifact("report.txt")
    report.add_artifact("index.json")
    report.to_json(out / "report.json")
    report.to_markdown(out / "report.md")
    report.to_text(out / "report.txt")
    with open(out / "index.json", "w", encoding="utf-8") as handle:
        json.dump({"artifacts": sorted(report.artifacts)}, handle, indent=2, sort_keys=True)
        handle.write("\n")
    logger.info(f"Report written to {out}")
    return [out / name for name in sorted(report.artifacts)]
