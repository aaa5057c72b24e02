"""Dyadic partitions of unity on the energy axis.

The pair (Phi, phi) is built from a polynomial smoothstep of order 7 (C^3 at
the seams; the fixed choice is recorded in the system object):

    Phi = 1 on [-1/2, 1/2], supported in [-1, 1],
    phi(x) = Phi(x) - Phi(2x), supported in {1/4 <= |x| <= 1},

so that sum_j phi(2^{-j} x) telescopes to 1 for x != 0 and
Phi + sum_{j>=1} phi_j = 1 everywhere.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np


def smoothstep7(u):
    """Order-7 polynomial step: 0 to 1 on [0,1] with three vanishing derivatives."""
    u = np.clip(u, 0.0, 1.0)
    return u**4 * (35.0 - 84.0 * u + 70.0 * u**2 - 20.0 * u**3)


@dataclass(frozen=True)
class BandWindow:
    """A spectral window: callable of energy with known support band."""

    fn: Callable[[np.ndarray], np.ndarray]
    band: tuple     # (xi_lo, xi_hi), support in energy
    tag: str
    j: int | None = None

    def __call__(self, xi):
        return self.fn(np.asarray(xi, dtype=float))

    def times(self, mu: Callable, tag: str | None = None) -> "BandWindow":
        f = self.fn
        return BandWindow(fn=lambda xi: f(xi) * mu(xi),
                          band=self.band, tag=tag or f"mu*{self.tag}", j=self.j)

    def is_empty(self) -> bool:
        return self.band[1] <= self.band[0]


@dataclass(frozen=True)
class DyadicSystem:
    j_lo: int
    j_hi: int
    profile: str = "smoothstep7"

    def Phi(self, x):
        a = np.abs(np.asarray(x, dtype=float))
        return 1.0 - smoothstep7(2.0 * (a - 0.5))

    def phi(self, x):
        return self.Phi(x) - self.Phi(2.0 * np.asarray(x, dtype=float))

    def Phi_j(self, j: int, x):
        return self.Phi(np.asarray(x, dtype=float) * 2.0 ** (-j))

    def phi_j(self, j: int, x):
        return self.phi(np.asarray(x, dtype=float) * 2.0 ** (-j))

    def Psi_j(self, j: int, k):
        k = np.asarray(k, dtype=float)
        return self.Phi_j(j, k * k)

    def psi_j(self, j: int, k):
        k = np.asarray(k, dtype=float)
        return self.phi_j(j, k * k)

    @staticmethod
    def lambda_j(j: int) -> float:
        return 2.0 ** (-j / 2.0)

    # spectral windows for kernel assembly
    def window_phi_j(self, j: int) -> BandWindow:
        return BandWindow(fn=lambda xi: self.phi_j(j, xi),
                          band=(2.0 ** (j - 2), 2.0 ** j), tag=f"phi_{j}", j=j)

    def window_Phi_j(self, j: int) -> BandWindow:
        return BandWindow(fn=lambda xi: self.Phi_j(j, xi),
                          band=(0.0, 2.0 ** j), tag=f"Phi_{j}", j=j)

    def window_high(self, j: int, j0: int) -> BandWindow:
        """(1 - Phi_{j0}) Phi_j, the high-energy cutoff block."""
        lo = 2.0 ** (j0 - 1)
        hi = 2.0 ** j
        return BandWindow(
            fn=lambda xi: (1.0 - self.Phi_j(j0, xi)) * self.Phi_j(j, xi),
            band=(min(lo, hi), hi), tag=f"(1-Phi_{j0})Phi_{j}", j=j)

    def window_tail(self, j: int, j_I: int) -> BandWindow:
        """phi_j (1 - Phi_{j_I}); identically zero when j <= j_I - 1."""
        lo = max(2.0 ** (j - 2), 2.0 ** (j_I - 1))
        hi = 2.0 ** j
        return BandWindow(
            fn=lambda xi: self.phi_j(j, xi) * (1.0 - self.Phi_j(j_I, xi)),
            band=(min(lo, hi), hi), tag=f"phi_{j}(1-Phi_{j_I})", j=j)

    def partition_values(self, x) -> np.ndarray:
        """sum_{j in [j_lo, j_hi]} phi_j(x), for the truncated partition identity."""
        x = np.asarray(x, dtype=float)
        out = np.zeros_like(x)
        for j in range(self.j_lo, self.j_hi + 1):
            out += self.phi_j(j, x)
        return out


def make_dyadic(j_lo: int, j_hi: int, profile: str = "smoothstep7") -> DyadicSystem:
    if j_lo >= j_hi:
        raise ValueError("need j_lo < j_hi")
    if profile != "smoothstep7":
        raise ValueError(f"unknown dyadic profile {profile!r}")
    return DyadicSystem(j_lo=j_lo, j_hi=j_hi, profile=profile)
