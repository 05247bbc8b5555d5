"""Newton diagrams, normal cones and the cone partition of dyadic indices.

The normal cone of an exponent ``v`` of ``P`` is

    C(v) = {w >= 0 : w.(u - v) >= 0 for every u in the support}.

``v`` is a corner point exactly when C(v) is full-dimensional; its extreme
rays are the primitive inward facet normals through ``v``. All cone
arithmetic is done with Python integers and ``Fraction``; floats appear
only when a degenerate cone has to be triangulated.
"""

from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from typing import Iterator, Sequence

import numpy as np
from scipy.spatial import Delaunay

from newton_maximal.errors import DiagramError
from newton_maximal.polynomial import MAX_DIMENSION, Exponent, Polynomial, zero_coordinates
from newton_maximal.report import VerificationReport

logger = logging.getLogger(__name__)

Ray = tuple[int, ...]
Rational = Fraction | float

INFINITY = math.inf
_MAX_LISTED_VIOLATIONS = 50


# ---------------------------------------------------------------------------
# Exact integer linear algebra
# ---------------------------------------------------------------------------


def _det(matrix: Sequence[Sequence[int]]) -> int:
    size = len(matrix)
    if size == 0:
        return 1
    if size == 1:
        return matrix[0][0]
    if size == 2:
        return matrix[0][0] * matrix[1][1] - matrix[0][1] * matrix[1][0]
    total = 0
    for column in range(size):
        if matrix[0][column] == 0:
            continue
        minor = [row[:column] + row[column + 1:] for row in matrix[1:]]
        total += (-1) ** column * matrix[0][column] * _det(minor)
    return total


def _adjugate(matrix: Sequence[Sequence[int]]) -> tuple[tuple[int, ...], ...]:
    size = len(matrix)
    if size == 1:
        return ((1,),)
    rows = []
    for i in range(size):
        row = []
        for j in range(size):
            minor = [
                [matrix[r][c] for c in range(size) if c != i]
                for r in range(size)
                if r != j
            ]
            row.append((-1) ** (i + j) * _det(minor))
        rows.append(tuple(row))
    return tuple(rows)


def _kernel_vector(rows: Sequence[Sequence[int]], n: int) -> Ray:
    """Generalized cross product of ``n - 1`` rows; zero iff the rows are dependent."""

    return tuple(
        (-1) ** i * _det([list(row[:i]) + list(row[i + 1:]) for row in rows])
        for i in range(n)
    )


def _rank(vectors: Sequence[Sequence[int]]) -> int:
    matrix = [[Fraction(x) for x in v] for v in vectors]
    rank = 0
    columns = len(matrix[0]) if matrix else 0
    for column in range(columns):
        pivot = next((r for r in range(rank, len(matrix)) if matrix[r][column] != 0), None)
        if pivot is None:
            continue
        matrix[rank], matrix[pivot] = matrix[pivot], matrix[rank]
        for r in range(len(matrix)):
            if r != rank and matrix[r][column] != 0:
                ratio = matrix[r][column] / matrix[rank][column]
                matrix[r] = [a - ratio * b for a, b in zip(matrix[r], matrix[rank])]
        rank += 1
    return rank


def _primitive(vector: Sequence[int]) -> Ray:
    divisor = reduce(math.gcd, (abs(x) for x in vector), 0)
    if divisor == 0:
        return tuple(vector)
    return tuple(x // divisor for x in vector)


def _dot(a: Sequence[int], b: Sequence[int]) -> int:
    return sum(x * y for x, y in zip(a, b))


def _difference(a: Sequence[int], b: Sequence[int]) -> tuple[int, ...]:
    return tuple(x - y for x, y in zip(a, b))


def _normal_order(ray: Ray) -> tuple[float, ...]:
    norm = math.sqrt(sum(x * x for x in ray))
    return tuple(-x / norm for x in ray)


# ---------------------------------------------------------------------------
# Domain types
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class VertexData:
    """A corner point with its (possibly virtual, simplicial) normal bundle."""

    vertex: Exponent
    normals: tuple[Ray, ...]
    denominator: int
    beta: Rational
    zero_coords: frozenset[int]
    nonzero_coords: frozenset[int]
    axis_normals: tuple[tuple[int, Ray], ...]
    gamma: tuple[Rational, ...] | None
    witness: Ray
    degenerate: bool = False
    gamma_degenerate: bool = False
    determinant: int = field(default=1, repr=False)
    adjugate: tuple[tuple[int, ...], ...] = field(default=(), repr=False)

    @property
    def n(self) -> int:
        return len(self.vertex)

    @property
    def normal_sum(self) -> Ray:
        return tuple(sum(column) for column in zip(*self.normals))

    @property
    def c_exponent(self) -> Fraction:
        """(1/d) (sum of normals) . v_j; c_N = 2^{-N c_exponent}."""

        return Fraction(_dot(self.normal_sum, self.vertex), self.denominator)

    def level_scale(self, level: int) -> float:
        return 2.0 ** (-float(level * self.c_exponent))

    @property
    def slot_exponents(self) -> tuple[Fraction, ...]:
        return tuple(Fraction(_dot(normal, self.vertex), self.denominator) for normal in self.normals)

    def sigma_m(self, slot: int) -> tuple[Fraction, ...]:
        exponents = self.slot_exponents
        return exponents[:slot] + exponents[slot + 1:]

    @property
    def axis_slots(self) -> tuple[int, ...]:
        axis_rays = {ray for _, ray in self.axis_normals}
        return tuple(i for i, normal in enumerate(self.normals) if normal in axis_rays)

    @property
    def b_slots(self) -> tuple[int, ...]:
        axis = set(self.axis_slots)
        return tuple(i for i in range(len(self.normals)) if i not in axis)

    @property
    def sigma(self) -> tuple[Fraction, ...]:
        """(1/d) n^(b_i) . v_j over the non-axis normals."""

        exponents = self.slot_exponents
        return tuple(exponents[i] for i in self.b_slots)

    def scaled_coordinates(self, q: Sequence[int]) -> tuple[int, ...]:
        """d_j times the cone coordinates of ``q``; exact integers."""

        sign = 1 if self.determinant > 0 else -1
        return tuple(sign * _dot(row, q) for row in self.adjugate)

    def scaled_coordinates_batch(self, indices: np.ndarray) -> np.ndarray:
        sign = 1 if self.determinant > 0 else -1
        return sign * (indices @ np.array(self.adjugate, dtype=np.int64).T)


@dataclass(frozen=True)
class IndexDecomposition:
    """q = sum_i (coordinates_i / d) n^(i) with coordinates_slot = level minimal."""

    vertex_index: int
    slot: int
    level: int
    offsets: tuple[int, ...]
    coordinates: tuple[int, ...]
    denominator: int

    @property
    def cone_coefficients(self) -> tuple[Fraction, ...]:
        return tuple(Fraction(c, self.denominator) for c in self.coordinates)


@dataclass(frozen=True)
class AxisDecomposition:
    """Zero-coordinate split q = sum k_i/d n^(a_i) + sum l_i/d n^(b_i)."""

    vertex_index: int
    axis_offsets: tuple[int, ...]
    b_offsets: tuple[int, ...]
    denominator: int


@dataclass(frozen=True)
class ScalingConstants:
    c_exponent: Fraction
    slot_exponents: tuple[Fraction, ...]
    sigma: tuple[Fraction, ...]

    def sigma_m(self, slot: int) -> tuple[Fraction, ...]:
        return self.slot_exponents[:slot] + self.slot_exponents[slot + 1:]


@dataclass(frozen=True)
class NewtonDiagram:
    polynomial: Polynomial
    vertices: tuple[VertexData, ...]

    @property
    def n(self) -> int:
        return self.polynomial.n

    @property
    def support(self) -> tuple[Exponent, ...]:
        return self.polynomial.support

    @property
    def corner_points(self) -> tuple[Exponent, ...]:
        """Distinct corner points (virtual subcone copies collapsed)."""

        return tuple(dict.fromkeys(v.vertex for v in self.vertices))

    def vertex(self, j: int) -> VertexData:
        if not 0 <= j < len(self.vertices):
            raise IndexError(f"vertex index {j} outside 0..{len(self.vertices) - 1}")
        return self.vertices[j]

    def cone_coordinates(self, j: int, q: Sequence[int]) -> tuple[Fraction, ...]:
        data = self.vertex(j)
        return tuple(Fraction(c, data.denominator) for c in data.scaled_coordinates(q))

    def contains(self, j: int, q: Sequence[int]) -> bool:
        return all(c >= 0 for c in self.vertex(j).scaled_coordinates(q))

    def in_t_region(self, j: int, q: Sequence[int]) -> bool:
        """Strict test q.(v - v_j) > 0 for every other support point."""

        vertex = self.vertex(j).vertex
        return all(
            _dot(q, _difference(v, vertex)) > 0 for v in self.support if v != vertex
        )

    def to_dict(self) -> dict:
        return {
            "polynomial": self.polynomial.to_text(),
            "n": self.n,
            "support": [list(v) for v in self.support],
            "vertices": [_vertex_to_dict(v) for v in self.vertices],
        }


def rational_to_json(value: Rational) -> str:
    if isinstance(value, float):
        return "inf" if math.isinf(value) else repr(value)
    return str(value)


def _vertex_to_dict(data: VertexData) -> dict:
    constants = scaling_constants(data)
    return {
        "vertex": list(data.vertex),
        "normals": [list(normal) for normal in data.normals],
        "denominator": data.denominator,
        "beta": rational_to_json(data.beta),
        "gamma": None if data.gamma is None else [rational_to_json(g) for g in data.gamma],
        "zero_coords": sorted(data.zero_coords),
        "nonzero_coords": sorted(data.nonzero_coords),
        "witness": list(data.witness),
        "degenerate": data.degenerate,
        "c_exponent": rational_to_json(constants.c_exponent),
        "sigma": [rational_to_json(s) for s in constants.sigma],
    }


# ---------------------------------------------------------------------------
# Construction
# ---------------------------------------------------------------------------


def _cone_rays(vertex: Exponent, support: Sequence[Exponent]) -> list[Ray]:
    """Extreme rays of {w >= 0 : w.(u - vertex) >= 0} by exact enumeration."""

    n = len(vertex)
    constraints: list[Ray] = [tuple(int(i == k) for k in range(n)) for i in range(n)]
    for u in support:
        if u != vertex:
            constraints.append(_primitive(_difference(u, vertex)))
    constraints = list(dict.fromkeys(constraints))
    if n == 1:
        return [(1,)] if all(c[0] >= 0 for c in constraints) else []
    rays: set[Ray] = set()
    for rows in itertools.combinations(constraints, n - 1):
        kernel = _kernel_vector(rows, n)
        if not any(kernel):
            continue
        for candidate in (kernel, tuple(-x for x in kernel)):
            if all(_dot(c, candidate) >= 0 for c in constraints):
                rays.add(_primitive(candidate))
    return sorted(rays, key=_normal_order)


def _lower_left_hull(support: Sequence[Exponent]) -> list[Exponent]:
    """Corner points of a planar Newton polygon, ordered by increasing t1-exponent."""

    points = sorted(set(support))
    hull: list[Exponent] = []
    for point in points:
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            cross = (x2 - x1) * (point[1] - y1) - (y2 - y1) * (point[0] - x1)
            if cross <= 0:
                hull.pop()
            else:
                break
        hull.append(point)
    lowest = min(p[1] for p in hull)
    cut = next(i for i, p in enumerate(hull) if p[1] == lowest)
    return hull[: cut + 1]


def _planar_bundles(support: Sequence[Exponent]) -> list[tuple[Exponent, list[Ray]]]:
    corners = _lower_left_hull(support)
    edges = [
        _primitive((a[1] - b[1], b[0] - a[0])) for a, b in zip(corners, corners[1:])
    ]
    bundles = []
    for i, corner in enumerate(corners):
        left = edges[i - 1] if i > 0 else (1, 0)
        right = edges[i] if i < len(edges) else (0, 1)
        bundles.append((corner, sorted([left, right], key=_normal_order)))
    return bundles


def _general_bundles(support: Sequence[Exponent]) -> list[tuple[Exponent, list[Ray]]]:
    n = len(support[0])
    bundles = []
    for v in sorted(support):
        rays = _cone_rays(v, support)
        if rays and _rank(rays) == n:
            bundles.append((v, rays))
    return bundles


def _simplicial_subcones(rays: list[Ray]) -> list[list[Ray]]:
    """Triangulate a full-dimensional pointed cone through a cross-section."""

    n = len(rays[0])
    witness = np.array([sum(column) for column in zip(*rays)], dtype=float)
    section = np.array([np.array(r, dtype=float) / float(np.dot(witness, r)) for r in rays])
    _, _, vh = np.linalg.svd(witness.reshape(1, -1))
    basis = vh[1:].T
    coordinates = (section - section.mean(axis=0)) @ basis
    triangulation = Delaunay(coordinates, qhull_options="QJ")
    subcones = []
    for simplex in triangulation.simplices:
        chosen = sorted((rays[i] for i in simplex), key=_normal_order)
        if len(set(chosen)) == n and _det(chosen) != 0:
            subcones.append(chosen)
    return subcones


def _make_vertex(
    vertex: Exponent,
    normals: list[Ray],
    support: Sequence[Exponent],
    degenerate: bool,
) -> VertexData:
    n = len(vertex)
    determinant = _det(normals)
    denominator = abs(determinant)
    transposed = [[normals[i][k] for i in range(n)] for k in range(n)]
    adjugate = _adjugate(transposed)
    normal_sum = tuple(sum(column) for column in zip(*normals))

    others = [u for u in support if u != vertex]
    beta: Rational = INFINITY
    if others:
        lowest = min(_dot(_difference(u, vertex), normal_sum) for u in others)
        beta = Fraction(lowest, denominator)

    zeros = zero_coordinates(vertex)
    nonzeros = frozenset(range(n)) - zeros
    axis_normals = tuple(
        (i, tuple(int(i == k) for k in range(n)))
        for i in sorted(zeros)
        if tuple(int(i == k) for k in range(n)) in normals
    )

    gamma: tuple[Rational, ...] | None = None
    gamma_degenerate = False
    if zeros:
        outside = [u for u in support if any(u[i] != 0 for i in zeros)]
        if len(axis_normals) != len(zeros):
            gamma_degenerate = True
        elif not outside:
            gamma = tuple(INFINITY for _ in zeros)
        else:
            values = tuple(
                Fraction(min(u[i] - vertex[i] for u in outside), denominator) for i in sorted(zeros)
            )
            if all(value > 0 for value in values):
                gamma = values
            else:
                gamma_degenerate = True
                logger.warning(f"Vertex {vertex}: gamma has a nonpositive component {values}")

    return VertexData(
        vertex=vertex,
        normals=tuple(normals),
        denominator=denominator,
        beta=beta,
        zero_coords=zeros,
        nonzero_coords=nonzeros,
        axis_normals=axis_normals,
        gamma=gamma,
        witness=normal_sum,
        degenerate=degenerate,
        gamma_degenerate=gamma_degenerate,
        determinant=determinant,
        adjugate=adjugate,
    )


def build_diagram(p: Polynomial, *, planar_fast_path: bool = True) -> NewtonDiagram:
    """Construct the Newton diagram of ``p``.

    Vertices come out in ascending lexicographic order of their exponents.
    A degenerate corner in ``n >= 3`` (more than ``n`` facets) is replaced by
    one virtual vertex per simplicial subcone, each flagged ``degenerate``.

    Raises:
        DiagramError: If the support is empty, ``n`` exceeds the supported
            dimension, or a computed bundle fails its exact checks.
    """

    if p.is_zero:
        raise DiagramError("Newton diagram of the zero polynomial is undefined")
    if p.n > MAX_DIMENSION:
        raise DiagramError(f"dimension {p.n} exceeds {MAX_DIMENSION}")
    support = p.support
    if p.n == 2 and planar_fast_path:
        bundles = _planar_bundles(support)
    else:
        bundles = _general_bundles(support)

    vertices: list[VertexData] = []
    for vertex, rays in sorted(bundles):
        if len(rays) == p.n:
            vertices.append(_make_vertex(vertex, rays, support, degenerate=False))
            continue
        subcones = _simplicial_subcones(rays)
        logger.warning(
            f"Vertex {vertex} has {len(rays)} facets in dimension {p.n}; "
            f"subdivided into {len(subcones)} simplicial cones"
        )
        for normals in subcones:
            vertices.append(_make_vertex(vertex, normals, support, degenerate=True))

    diagram = NewtonDiagram(p, tuple(vertices))
    _check_bundles(diagram)
    logger.debug(f"Diagram of {p.to_text()}: {len(diagram.corner_points)} corner point(s)")
    return diagram


def _check_bundles(diagram: NewtonDiagram) -> None:
    for data in diagram.vertices:
        for normal in data.normals:
            if any(x < 0 for x in normal) or not any(normal):
                raise DiagramError(f"normal {normal} at {data.vertex} is not nonnegative")
            if _primitive(normal) != normal:
                raise DiagramError(f"normal {normal} at {data.vertex} is not primitive")
            for v in diagram.support:
                if _dot(normal, _difference(v, data.vertex)) < 0:
                    raise DiagramError(f"normal {normal} at {data.vertex} violates {v}")
        if any(x <= 0 for x in data.witness):
            raise DiagramError(f"witness {data.witness} at {data.vertex} is not strictly positive")
        for v in diagram.support:
            if v != data.vertex and _dot(data.witness, _difference(v, data.vertex)) <= 0:
                raise DiagramError(f"witness at {data.vertex} does not separate {v}")
        if data.denominator == 0:
            raise DiagramError(f"normals at {data.vertex} are linearly dependent")


# ---------------------------------------------------------------------------
# Queries
# ---------------------------------------------------------------------------


def decompose_index(diagram: NewtonDiagram, q: Sequence[int]) -> IndexDecomposition:
    """Classify ``q`` into (vertex, slot, level, offsets); smallest j, then smallest slot.

    Raises:
        DiagramError: If no cone contains ``q``.
    """

    q = tuple(int(x) for x in q)
    if len(q) != diagram.n or any(x < 0 for x in q):
        raise ValueError(f"index {q} is not a nonnegative {diagram.n}-vector")
    for j, data in enumerate(diagram.vertices):
        coordinates = data.scaled_coordinates(q)
        if any(c < 0 for c in coordinates):
            continue
        level = min(coordinates)
        slot = coordinates.index(level)
        offsets = tuple(c - level for i, c in enumerate(coordinates) if i != slot)
        return IndexDecomposition(j, slot, level, offsets, coordinates, data.denominator)
    raise DiagramError(f"index {q} lies in no cone of the diagram")


def reconstruct(diagram: NewtonDiagram, decomposition: IndexDecomposition) -> tuple[int, ...]:
    """Rebuild q from a decomposition; exact, raises if q is not integral."""

    normals = diagram.vertex(decomposition.vertex_index).normals
    coordinates = list(decomposition.offsets)
    coordinates = [c + decomposition.level for c in coordinates]
    coordinates.insert(decomposition.slot, decomposition.level)
    q = [
        sum(Fraction(c * normal[k], decomposition.denominator) for c, normal in zip(coordinates, normals))
        for k in range(diagram.n)
    ]
    if any(x.denominator != 1 for x in q):
        raise DiagramError(f"decomposition {decomposition} does not reconstruct an integer index")
    return tuple(int(x) for x in q)


def decompose_axis_index(diagram: NewtonDiagram, j: int, q: Sequence[int]) -> AxisDecomposition:
    """Zero-coordinate split of ``q`` in the cone of vertex ``j``."""

    data = diagram.vertex(j)
    if not data.zero_coords:
        raise ValueError(f"vertex {data.vertex} has no zero coordinates")
    coordinates = data.scaled_coordinates(q)
    if any(c < 0 for c in coordinates):
        raise DiagramError(f"index {tuple(q)} is not in the cone of vertex {data.vertex}")
    return AxisDecomposition(
        vertex_index=j,
        axis_offsets=tuple(coordinates[i] for i in data.axis_slots),
        b_offsets=tuple(coordinates[i] for i in data.b_slots),
        denominator=data.denominator,
    )


def axis_index(diagram: NewtonDiagram, j: int, axis_offsets: Sequence[int], b_offsets: Sequence[int]) -> tuple[int, ...]:
    """Inverse of :func:`decompose_axis_index`; raises if the result is not integral."""

    data = diagram.vertex(j)
    coordinates = [0] * len(data.normals)
    for slot, value in zip(data.axis_slots, axis_offsets):
        coordinates[slot] = value
    for slot, value in zip(data.b_slots, b_offsets):
        coordinates[slot] = value
    q = [
        sum(Fraction(c * normal[k], data.denominator) for c, normal in zip(coordinates, data.normals))
        for k in range(diagram.n)
    ]
    if any(x.denominator != 1 for x in q):
        raise DiagramError(f"offsets {tuple(axis_offsets)}, {tuple(b_offsets)} give a non-integral index")
    return tuple(int(x) for x in q)


def slot_index(diagram: NewtonDiagram, j: int, slot: int, level: int, offsets: Sequence[int]) -> tuple[int, ...]:
    """Index q of S_m^N(j) with the given slot, level and offsets."""

    data = diagram.vertex(j)
    decomposition = IndexDecomposition(
        vertex_index=j,
        slot=slot,
        level=level,
        offsets=tuple(offsets),
        coordinates=(),
        denominator=data.denominator,
    )
    return reconstruct(diagram, decomposition)


def beta_constant(data: VertexData, support: Sequence[Exponent]) -> Rational:
    """beta_j = (1/d) min over v != v_j of (v - v_j).(sum of normals).

    Returns ``math.inf`` for a single-monomial support.

    Raises:
        DiagramError: If the minimum is not positive.
    """

    others = [v for v in support if tuple(v) != data.vertex]
    if not others:
        return INFINITY
    lowest = min(_dot(_difference(v, data.vertex), data.normal_sum) for v in others)
    if lowest <= 0:
        raise DiagramError(f"beta at {data.vertex} is not positive ({lowest}/{data.denominator})")
    return Fraction(lowest, data.denominator)


def gamma_constant(data: VertexData, support: Sequence[Exponent]) -> tuple[Rational, ...]:
    """gamma_j^i = (1/d) min over v outside Lambda_0 of n^(a_i).(v - v_j), for i in A.

    Returns ``math.inf`` entries when every support point lies in Lambda_0.

    Raises:
        ValueError: If the vertex has no zero coordinates.
        DiagramError: If an axis normal is missing or some component is not positive.
    """

    zeros = sorted(data.zero_coords)
    if not zeros:
        raise ValueError(f"vertex {data.vertex} has no zero coordinates")
    axes = dict(data.axis_normals)
    if len(axes) != len(zeros):
        raise DiagramError(f"vertex {data.vertex} lacks an axis normal")
    outside = [tuple(v) for v in support if any(v[i] != 0 for i in zeros)]
    if not outside:
        return tuple(INFINITY for _ in zeros)
    values = tuple(
        Fraction(min(_dot(axes[i], _difference(v, data.vertex)) for v in outside), data.denominator)
        for i in zeros
    )
    if any(value <= 0 for value in values):
        raise DiagramError(f"gamma at {data.vertex} has a nonpositive component {values}")
    return values


def scaling_constants(data: VertexData) -> ScalingConstants:
    """c_N exponent, per-slot exponents (sigma_m omits one) and the B-normal sigma."""

    return ScalingConstants(
        c_exponent=data.c_exponent,
        slot_exponents=data.slot_exponents,
        sigma=data.sigma,
    )


def _index_blocks(n: int, q_max: int) -> Iterator[np.ndarray]:
    """All q in {0..q_max}^n, chunked by the first coordinate."""

    tail = np.arange(q_max + 1, dtype=np.int64)
    if n == 1:
        yield tail.reshape(-1, 1)
        return
    grids = np.meshgrid(*([tail] * (n - 1)), indexing="ij")
    rest = np.stack([g.ravel() for g in grids], axis=-1)
    for first in range(q_max + 1):
        head = np.full((rest.shape[0], 1), first, dtype=np.int64)
        yield np.concatenate([head, rest], axis=1)


def verify_partition(
    diagram: NewtonDiagram,
    q_max: int,
    report: VerificationReport | None = None,
    suite: str = "partition",
) -> VerificationReport:
    """Exhaustively check the cone partition over {0..q_max}^n.

    Checks exact normal inequalities, that every q lies in some cone,
    that the strict regions T(j) are pairwise disjoint, and the level
    bound q.(v - v_j) >= beta_j N for every decomposition of every q.
    """

    if q_max < 1:
        raise ValueError(f"q_max must be >= 1, got {q_max}")
    report = report if report is not None else VerificationReport()
    report.add_suite(suite)
    support = diagram.support
    listed = 0

    def violation(check: str, description: str, **details: str) -> None:
        nonlocal listed
        listed += 1
        if listed <= _MAX_LISTED_VIOLATIONS:
            report.add_violation(suite, check, "error", description, **details)

    for data in diagram.vertices:
        for normal in data.normals:
            for v in support:
                if _dot(normal, _difference(v, data.vertex)) < 0:
                    violation(
                        "normal_inequality",
                        f"normal {normal} at {data.vertex} is negative on {v}",
                    )

    corners = diagram.corner_points
    corner_differences = {
        corner: np.array([_difference(v, corner) for v in support if v != corner], dtype=np.int64).reshape(-1, diagram.n)
        for corner in corners
    }
    beta_numerators = []
    for data in diagram.vertices:
        others = [v for v in support if v != data.vertex]
        numerator = min((_dot(_difference(v, data.vertex), data.normal_sum) for v in others), default=None)
        beta_numerators.append(numerator)

    counts = {"indices": 0, "uncovered": 0, "t_overlaps": 0, "level_bound": 0}
    for block in _index_blocks(diagram.n, q_max):
        counts["indices"] += block.shape[0]
        covered = np.zeros(block.shape[0], dtype=bool)
        for j, data in enumerate(diagram.vertices):
            scaled = data.scaled_coordinates_batch(block)
            member = np.all(scaled >= 0, axis=1)
            covered |= member
            numerator = beta_numerators[j]
            if numerator is None or not member.any():
                continue
            levels = scaled[member].min(axis=1)
            products = block[member] @ corner_differences[data.vertex].T
            failing = np.any(data.denominator * products < numerator * levels[:, None], axis=1)
            for q in block[member][failing]:
                counts["level_bound"] += 1
                violation(
                    "level_bound",
                    f"q={tuple(int(x) for x in q)} at vertex {data.vertex} violates q.(v-v_j) >= beta N",
                    expected=f"beta={rational_to_json(data.beta)}",
                )
        for q in block[~covered]:
            counts["uncovered"] += 1
            violation("coverage", f"q={tuple(int(x) for x in q)} lies in no cone")

        if len(corners) > 1:
            strict = np.stack(
                [np.all(block @ corner_differences[c].T > 0, axis=1) for c in corners], axis=1
            )
            for q in block[strict.sum(axis=1) > 1]:
                counts["t_overlaps"] += 1
                violation("t_disjoint", f"q={tuple(int(x) for x in q)} lies in two strict regions")

    if listed > _MAX_LISTED_VIOLATIONS:
        report.add_violation(
            suite,
            "summary",
            "error",
            f"{listed - _MAX_LISTED_VIOLATIONS} further violations not listed",
        )
    report.record(suite, f"{diagram.polynomial.to_text()}|q_max={q_max}", counts)
    logger.info(
        f"Partition check of {diagram.polynomial.to_text()} up to q_max={q_max}: "
        f"{counts['indices']} indices, {listed} violation(s)"
    )
    return report
