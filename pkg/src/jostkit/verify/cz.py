"""Calderon-Zygmund decomposition and the Hardy-Littlewood maximal function.

The decomposition is the dyadic stopping time on interval halves: descend from
the whole window, select an interval the first time its |f|-mean exceeds the
height alpha, recurse otherwise down to single cells. On the grid the standard
properties hold exactly with constant 2:

    (i)  |g| <= 2 alpha everywhere (= alpha off the selected cubes),
    (ii) mean of |f| over each selected cube <= 2 alpha,
    (iii) sum |I_k| <= ||f||_1 / alpha,

and f = g + sum b_k with each b_k supported on its cube with zero mean.
Power-of-two windows make every cube length an integer power of sqrt(2).
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass
class CZCube:
    start: int          # index range [start, stop)
    stop: int
    length: float
    mean_abs: float

    def j_index(self) -> float:
        """j with length = 2^{-j/2} (integer for power-of-2 lengths)."""
        return -2.0 * np.log2(self.length)


@dataclass
class CZDecomposition:
    f: np.ndarray
    dx: float
    alpha: float
    g: np.ndarray
    cubes: list = field(default_factory=list)
    bad_parts: list = field(default_factory=list)    # arrays matching each cube

    def b_total(self) -> np.ndarray:
        b = np.zeros_like(self.f, dtype=float)
        for cube, part in zip(self.cubes, self.bad_parts):
            b[cube.start:cube.stop] += part
        return b

    def total_cube_length(self) -> float:
        return float(sum(c.stop - c.start for c in self.cubes) * self.dx)


def cz_decompose(f: np.ndarray, alpha: float, dx: float) -> CZDecomposition:
    """Stopping-time decomposition of grid samples at height alpha.

    Cell counts are halved (larger half first when odd); the root mean must
    not already exceed alpha, else the construction has no good part.
    """
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    f = np.asarray(f, dtype=float)
    n = len(f)
    P = np.concatenate([[0.0], np.cumsum(np.abs(f))])   # cell sums / dx

    def mean(a, b):
        return (P[b] - P[a]) / (b - a)

    if mean(0, n) > alpha:
        raise ValueError("root mean already exceeds alpha; decrease the height "
                         "or extend the window")
    cubes = []
    stack = [(0, n)]
    while stack:
        a, b = stack.pop()
        if b - a == 1:
            continue
        mid = a + (b - a + 1) // 2
        for (u, v) in ((a, mid), (mid, b)):
            if u >= v:
                continue
            if mean(u, v) > alpha:
                cubes.append((u, v))
            else:
                stack.append((u, v))
    cubes.sort()
    g = f.astype(float).copy()
    cz = CZDecomposition(f=f, dx=dx, alpha=alpha, g=g)
    for (a, b) in cubes:
        mu = float(np.mean(f[a:b]))
        part = f[a:b] - mu
        g[a:b] = mu
        cz.cubes.append(CZCube(a, b, (b - a) * dx, mean(a, b)))
        cz.bad_parts.append(part)
    return cz


def hl_maximal(f: np.ndarray, dx: float) -> np.ndarray:
    """Centered Hardy-Littlewood maximal function over grid-aligned windows.

    f is treated as compactly supported (zero off the grid), so windows may
    extend past the edges with zero mass but full normalizing length.
    """
    f = np.abs(np.asarray(f, dtype=float))
    n = len(f)
    P = np.concatenate([[0.0], np.cumsum(f)])
    out = f.copy()                       # m = 0 window is the point itself
    idx = np.arange(n)
    for m in range(1, n):
        lo = np.maximum(idx - m, 0)
        hi = np.minimum(idx + m + 1, n)
        avg = (P[hi] - P[lo]) / (2 * m + 1)
        np.maximum(out, avg, out=out)
    return out
