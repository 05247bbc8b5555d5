"""Grid functions, the eta window and pushforward sampling.

Capabilities:
- :class:`GridFunction`: nonnegative samples at cell midpoints of a uniform grid
- :class:`EtaWindow`: smooth cutoff supported in [1/2, 4], equal to 1 on [1, 2]
- Midpoint and tensor-product quadrature rules
- :func:`pushforward_average`: sum_k w_k f(x_i - y_k) for every grid point x_i

f is extended by zero outside the grid and sampled by linear interpolation
between midpoints, with zero at the two midpoints just outside the grid.
The pushforward sum is computed by linear binning of the y_k onto the grid
lattice followed by one FFT convolution, which reproduces the interpolated
sum up to rounding.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np
from scipy.signal import fftconvolve

from newton_maximal.errors import GridError

# Mass consistency tolerance for step functions (relative).
MASS_TOLERANCE = 1e-12

# Eta window support.
ETA_LO = 0.5
ETA_HI = 4.0


@dataclass(frozen=True, eq=False)
class GridFunction:
    """Nonnegative f sampled at the midpoints of cells [x_lo + k dx, x_lo + (k+1) dx)."""

    x_lo: float
    dx: float
    values: np.ndarray
    exact_mass: float | None = None

    def __post_init__(self) -> None:
        values = np.array(self.values, dtype=float).ravel()
        if not (math.isfinite(self.dx) and self.dx > 0):
            raise GridError(f"grid step must be positive, got {self.dx}")
        if values.size == 0:
            raise GridError("grid function has no cells")
        if not np.all(np.isfinite(values)):
            raise GridError("grid function has non-finite samples")
        if np.any(values < 0):
            raise GridError(f"negative sample at cell {int(np.argmax(values < 0))}")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)
        if self.exact_mass is not None:
            discrete = float(values.sum() * self.dx)
            if abs(discrete - self.exact_mass) > MASS_TOLERANCE * max(1.0, abs(self.exact_mass)):
                raise GridError(
                    f"exact mass {self.exact_mass!r} disagrees with sampled mass {discrete!r}"
                )

    # -- constructors -----------------------------------------------------

    @classmethod
    def zeros(cls, x_lo: float, x_hi: float, dx: float) -> "GridFunction":
        return cls(x_lo, dx, np.zeros(_cell_count(x_lo, x_hi, dx)), exact_mass=0.0)

    @classmethod
    def constant(cls, value: float, x_lo: float, x_hi: float, dx: float) -> "GridFunction":
        size = _cell_count(x_lo, x_hi, dx)
        return cls(x_lo, dx, np.full(size, float(value)), exact_mass=float(value) * size * dx)

    @classmethod
    def from_steps(
        cls,
        pieces: Sequence[tuple[float, float, float]],
        x_lo: float,
        x_hi: float,
        dx: float,
    ) -> "GridFunction":
        """Sum of height * 1_[a, b) pieces, cell values set to exact cell averages."""

        size = _cell_count(x_lo, x_hi, dx)
        left = x_lo + dx * np.arange(size)
        right = left + dx
        values = np.zeros(size)
        mass = 0.0
        for a, b, height in pieces:
            if b < a or height < 0:
                raise GridError(f"invalid step piece ({a}, {b}, {height})")
            overlap = np.clip(np.minimum(right, b) - np.maximum(left, a), 0.0, None)
            values += height * overlap / dx
            mass += height * max(0.0, min(b, x_lo + size * dx) - max(a, x_lo))
        return cls(x_lo, dx, values, exact_mass=mass)

    @classmethod
    def indicator(cls, a: float, b: float, x_lo: float, x_hi: float, dx: float) -> "GridFunction":
        return cls.from_steps([(a, b, 1.0)], x_lo, x_hi, dx)

    @classmethod
    def from_callable(
        cls, func: Callable[[np.ndarray], np.ndarray], x_lo: float, x_hi: float, dx: float
    ) -> "GridFunction":
        size = _cell_count(x_lo, x_hi, dx)
        return cls(x_lo, dx, func(x_lo + dx * (np.arange(size) + 0.5)))

    # -- geometry -----------------------------------------------------------

    @property
    def size(self) -> int:
        return int(self.values.size)

    @property
    def x_hi(self) -> float:
        return self.x_lo + self.size * self.dx

    @property
    def midpoints(self) -> np.ndarray:
        return self.x_lo + self.dx * (np.arange(self.size) + 0.5)

    @property
    def mass(self) -> float:
        if self.exact_mass is not None:
            return self.exact_mass
        return float(self.values.sum() * self.dx)

    @property
    def is_dyadic_aligned(self) -> bool:
        mantissa, _ = math.frexp(self.dx)
        return mantissa == 0.5 and (self.x_lo / self.dx).is_integer()

    def support_cells(self) -> tuple[int, int] | None:
        """First and one-past-last cell with a nonzero value."""

        nonzero = np.flatnonzero(self.values)
        if nonzero.size == 0:
            return None
        return int(nonzero[0]), int(nonzero[-1]) + 1

    # -- transformations -----------------------------------------------------

    def scaled(self, factor: float) -> "GridFunction":
        if factor < 0:
            raise GridError("scale factor must be nonnegative")
        mass = None if self.exact_mass is None else self.exact_mass * factor
        return GridFunction(self.x_lo, self.dx, self.values * factor, exact_mass=mass)

    def translated(self, cells: int) -> "GridFunction":
        """Shift by an integer number of cells; mass may not leave the grid."""

        support = self.support_cells()
        if support is not None and (support[0] + cells < 0 or support[1] + cells > self.size):
            raise GridError(f"translation by {cells} cells moves mass off the grid")
        values = np.zeros(self.size)
        if support is not None:
            start, stop = support
            values[start + cells:stop + cells] = self.values[start:stop]
        return GridFunction(self.x_lo, self.dx, values, exact_mass=self.exact_mass)

    def with_values(self, values: np.ndarray) -> "GridFunction":
        return GridFunction(self.x_lo, self.dx, values)

    def sample(self, y) -> np.ndarray:
        """Linear interpolation of f at arbitrary points, zero outside."""

        padded_x = np.concatenate(
            [[self.x_lo - 0.5 * self.dx], self.midpoints, [self.x_hi + 0.5 * self.dx]]
        )
        padded_f = np.concatenate([[0.0], self.values, [0.0]])
        return np.interp(np.asarray(y, dtype=float), padded_x, padded_f, left=0.0, right=0.0)


def _cell_count(x_lo: float, x_hi: float, dx: float) -> int:
    if not (math.isfinite(dx) and dx > 0):
        raise GridError(f"grid step must be positive, got {dx}")
    if not x_hi > x_lo:
        raise GridError(f"empty grid domain [{x_lo}, {x_hi}]")
    cells = (x_hi - x_lo) / dx
    count = int(round(cells))
    if abs(cells - count) > 1e-9 * max(1.0, cells):
        raise GridError(f"domain length {x_hi - x_lo} is not a multiple of {dx}")
    return count


# ---------------------------------------------------------------------------
# Quadrature
# ---------------------------------------------------------------------------


def midpoint_rule(lo: float, hi: float, nodes: int) -> tuple[np.ndarray, np.ndarray]:
    """Composite midpoint nodes and weights on [lo, hi]."""

    if nodes < 1:
        raise ValueError(f"need at least one node, got {nodes}")
    width = (hi - lo) / nodes
    points = lo + width * (np.arange(nodes) + 0.5)
    return points, np.full(nodes, width)


def tensor_rule(
    points_1d: Sequence[np.ndarray], weights_1d: Sequence[np.ndarray]
) -> tuple[np.ndarray, np.ndarray]:
    """Tensor-product rule: points of shape (prod K_i, n), weights of shape (prod K_i,)."""

    grids = np.meshgrid(*points_1d, indexing="ij")
    points = np.stack([g.ravel() for g in grids], axis=-1)
    weights = weights_1d[0]
    for w in weights_1d[1:]:
        weights = np.einsum("i,j->ij", weights, w).ravel()
    return points, np.asarray(weights, dtype=float).ravel()


def _phi(x: np.ndarray) -> np.ndarray:
    positive = x > 0
    safe = np.where(positive, x, 1.0)
    return np.where(positive, np.exp(-1.0 / safe), 0.0)


def _transition(x: np.ndarray) -> np.ndarray:
    """Smooth step: 0 for x <= 0, 1 for x >= 1."""

    a = _phi(x)
    return a / (a + _phi(1.0 - x))


def eta(s) -> np.ndarray:
    s = np.asarray(s, dtype=float)
    return _transition(2.0 * (s - 0.5)) * _transition((4.0 - s) / 2.0)


@lru_cache(maxsize=32)
def _eta_tensor(nodes: int, n: int) -> tuple[np.ndarray, np.ndarray]:
    points, widths = midpoint_rule(ETA_LO, ETA_HI, nodes)
    weights = eta(points) * widths
    tensor_points, tensor_weights = tensor_rule([points] * n, [weights] * n)
    tensor_points.setflags(write=False)
    tensor_weights.setflags(write=False)
    return tensor_points, tensor_weights


@dataclass(frozen=True)
class EtaWindow:
    """eta(s) = T(2(s - 1/2)) T((4 - s)/2) with midpoint nodes on [1/2, 4]."""

    nodes: int = 16
    support: tuple[float, float] = field(default=(ETA_LO, ETA_HI), init=False)

    def __post_init__(self) -> None:
        if self.nodes < 1:
            raise ValueError(f"eta window needs at least one node, got {self.nodes}")

    def __call__(self, s) -> np.ndarray:
        return eta(s)

    def rule(self) -> tuple[np.ndarray, np.ndarray]:
        points, widths = midpoint_rule(ETA_LO, ETA_HI, self.nodes)
        return points, eta(points) * widths

    def tensor(self, n: int) -> tuple[np.ndarray, np.ndarray]:
        return _eta_tensor(self.nodes, n)

    @property
    def integral(self) -> float:
        """Quadrature value of the integral of eta over [1/2, 4]."""

        return float(self.rule()[1].sum())


# ---------------------------------------------------------------------------
# Pushforward sampling
# ---------------------------------------------------------------------------


def pushforward_average(f: GridFunction, y: np.ndarray, weights: np.ndarray | float) -> np.ndarray:
    """r_i = sum_k w_k f(x_i - y_k) at every midpoint x_i of ``f``'s grid."""

    y = np.asarray(y, dtype=float).ravel()
    weights = np.broadcast_to(np.asarray(weights, dtype=float), y.shape)
    size = f.size
    lattice = _linear_binning(y / f.dx, weights, -(size - 1), size - 1)
    full = fftconvolve(f.values, lattice)
    return full[size - 1: 2 * size - 1]


def _linear_binning(positions: np.ndarray, weights: np.ndarray, lo: int, hi: int) -> np.ndarray:
    """Split each weight between the two lattice points around its position."""

    base = np.floor(positions)
    fraction = positions - base
    index = base.astype(np.int64) - lo
    length = hi - lo + 1
    lattice = np.zeros(length)
    for offset, share in ((0, 1.0 - fraction), (1, fraction)):
        target = index + offset
        keep = (target >= 0) & (target < length)
        lattice += np.bincount(target[keep], weights=(weights * share)[keep], minlength=length)
    return lattice


@dataclass(frozen=True)
class GridSpec:
    """Domain [x_lo, x_hi) with step 2^-dx_log2."""

    x_lo: float = -8.0
    x_hi: float = 8.0
    dx_log2: int = 10

    @property
    def dx(self) -> float:
        return math.ldexp(1.0, -self.dx_log2)

    @property
    def size(self) -> int:
        return _cell_count(self.x_lo, self.x_hi, self.dx)

    def zeros(self) -> GridFunction:
        return GridFunction.zeros(self.x_lo, self.x_hi, self.dx)

    def steps(self, pieces: Sequence[tuple[float, float, float]]) -> GridFunction:
        return GridFunction.from_steps(pieces, self.x_lo, self.x_hi, self.dx)
