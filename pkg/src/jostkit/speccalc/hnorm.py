"""Scaling-invariant local Sobolev norm sup_t ||mu(t .) chi||_{W^s_2}.

chi is a fixed smooth bump supported in [1/4, 4] away from zero (smoothstep
shoulders, identically 1 on [1/2, 2]); Sobolev norms are evaluated by FFT on a
periodization window with the weight (1 + |omega|^2)^{s/2}.
"""
from __future__ import annotations

import numpy as np

from .dyadic import smoothstep7

CHI_SUPPORT = (0.25, 4.0)


def chi_default(xi):
    """Smooth bump: 0 off [1/4, 4], 1 on [1/2, 2], smoothstep shoulders."""
    xi = np.asarray(xi, dtype=float)
    up = smoothstep7((xi - 0.25) / 0.25)
    down = 1.0 - smoothstep7((xi - 2.0) / 2.0)
    return up * down


def sobolev_norm(values: np.ndarray, dx: float, s: float) -> float:
    """||f||_{W^s_2} from samples on a uniform grid (compactly supported f)."""
    n = len(values)
    G = np.fft.fft(values)
    om = 2.0 * np.pi * np.fft.fftfreq(n, d=dx)
    return float(np.sqrt(dx / n * np.sum((1.0 + om * om) ** s * np.abs(G) ** 2)))


def hoermander_norm(mu, s: float, t_grid=None, chi=None,
                    n_grid: int = 16384, pad: float = 2.0) -> dict:
    """sup over dilations t of ||mu(t .) chi||_{W^s_2}.

    t_grid defaults to dyadic t = 2^{j/2}, j in [-16, 16]; pass the grid
    spanning the sampled support of mu when mu is a sampled multiplier.
    Returns {norm, per_t, t_grid}.
    """
    if s <= 0.5:
        raise ValueError("the Hoermander norm needs s > 1/2")
    if chi is None:
        chi = chi_default
    if t_grid is None:
        t_grid = 2.0 ** (np.arange(-16, 17) / 2.0)
    t_grid = np.asarray(t_grid, dtype=float)

    lo, hi = CHI_SUPPORT
    width = (hi - lo) * pad
    x0 = max(lo - 0.5 * (width - (hi - lo)), 1e-6)
    xi = x0 + (width / n_grid) * np.arange(n_grid)
    dx = width / n_grid
    chiv = chi(xi)

    per_t = np.empty(len(t_grid))
    for i, t in enumerate(t_grid):
        g = np.asarray(mu(t * xi)) * chiv
        per_t[i] = sobolev_norm(g, dx, s)
    return {"norm": float(per_t.max()), "per_t": per_t, "t_grid": t_grid}
