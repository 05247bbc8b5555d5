"""
Brute-force reference implementations.

Provides:
- Corner points by a linear-programming separation test
- Uncentered Hardy-Littlewood maximal function by scanning every interval
- Direct averages of f(x - P(t)) by interpolation
- CZ stopping-time cubes by walking the dyadic tree top-down
"""
from typing import Iterable, Sequence, Set, Tuple

import numpy as np
from scipy.optimize import linprog


def brute_force_vertices(support: Iterable[Sequence[int]]) -> Set[Tuple[int, ...]]:
    """Points v with some w >= 1 such that w.(u - v) >= 1 for every other u."""
    points = [tuple(v) for v in support]
    n = len(points[0])
    corners = set()
    for v in points:
        others = [u for u in points if u != v]
        if not others:
            corners.add(v)
            continue
        # w.(u - v) >= 1  <=>  -(u - v).w <= -1
        a_ub = -np.array([[a - b for a, b in zip(u, v)] for u in others], dtype=float)
        b_ub = -np.ones(len(others))
        result = linprog(np.zeros(n), A_ub=a_ub, b_ub=b_ub, bounds=[(1, None)] * n, method="highs")
        if result.status == 0:
            corners.add(v)
    return corners


def hardy_littlewood_scan(values: np.ndarray) -> np.ndarray:
    """max over all cell ranges [a, b) containing i of the mean of values[a:b]."""
    size = values.size
    prefix = np.concatenate([[0.0], np.cumsum(values)])
    best = np.zeros(size)
    for a in range(size):
        for b in range(a + 1, size + 1):
            mean = (prefix[b] - prefix[a]) / (b - a)
            best[a:b] = np.maximum(best[a:b], mean)
    return best


def direct_average(f, p, points: np.ndarray, weights: np.ndarray) -> np.ndarray:
    """sum_k w_k f(x_i - P(t_k)) at every midpoint, by interpolation."""
    shifts = np.atleast_1d(p.evaluate(points))
    return np.array([float(np.sum(weights * f.sample(x - shifts))) for x in f.midpoints])


def stopping_cubes(values: np.ndarray, first: int, stop: int, threshold: float) -> list:
    """Maximal dyadic cell ranges inside [first, stop) with mean above the threshold."""
    cubes = []
    pending = [(first, stop)]
    while pending:
        a, b = pending.pop()
        middle = (a + b) // 2
        for lo, hi in ((a, middle), (middle, b)):
            mean = float(values[lo:hi].mean())
            if mean > threshold:
                cubes.append((lo, hi))
            elif hi - lo > 1:
                pending.append((lo, hi))
    return sorted(cubes)
