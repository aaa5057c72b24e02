"""Uniform grids shared by every module.

All x-, y- and w-integrals in the package run on uniform grids; keeping a
single grid type makes cross-module quadrature errors commensurable and lets
solvers exchange samples by index arithmetic instead of interpolation.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class UniformGrid:
    """Uniform 1D grid x_i = x0 + i*dx, i = 0..n-1."""

    x0: float
    dx: float
    n: int

    def __post_init__(self):
        if self.dx <= 0:
            raise ValueError("grid step must be positive")
        if self.n < 2:
            raise ValueError("grid needs at least two points")

    @property
    def x1(self) -> float:
        return self.x0 + (self.n - 1) * self.dx

    def points(self) -> np.ndarray:
        return self.x0 + self.dx * np.arange(self.n)

    def index_of(self, x: float, tol: float = 1e-9) -> int:
        """Index of the node equal to x; raises if x is not a node."""
        i = round((x - self.x0) / self.dx)
        if i < 0 or i >= self.n or abs(self.x0 + i * self.dx - x) > tol * max(1.0, abs(x)):
            raise ValueError(f"{x} is not a node of {self}")
        return int(i)

    def contains(self, x: float) -> bool:
        return self.x0 - 1e-12 <= x <= self.x1 + 1e-12

    def refine(self, factor: int = 2) -> "UniformGrid":
        """Same window, step divided by factor."""
        return UniformGrid(self.x0, self.dx / factor, (self.n - 1) * factor + 1)

    def spec(self) -> dict:
        return {"x0": self.x0, "dx": self.dx, "n": self.n}

    @staticmethod
    def from_spec(d: dict) -> "UniformGrid":
        return UniformGrid(float(d["x0"]), float(d["dx"]), int(d["n"]))

    @staticmethod
    def symmetric(half_width: float, dx: float) -> "UniformGrid":
        """Grid on [-half_width, half_width] with 0 as a node."""
        m = int(round(half_width / dx))
        return UniformGrid(-m * dx, dx, 2 * m + 1)
