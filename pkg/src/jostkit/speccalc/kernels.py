"""Operator kernels phi(H_ac)(x,y) by wavenumber quadrature.

The kernel formula in the lambda variable is

    K(x,y) = (1/2pi) int_R w(lambda^2) m+(x,lambda) m-(y,lambda) t(lambda)
             e^{i lambda (x-y)} d lambda,

valid for both orderings of x,y. Conjugation symmetry at -lambda folds the
integral onto [0, inf): since w(lambda^2) is even in lambda it factors out and

    K(x,y) = (1/pi) int_0^inf w(lambda^2) Re[t m+(x) m-(y) e^{i lambda(x-y)}] d lambda,

real for real windows, complex in general but always through Re of the
m±/t factor. The quadrature grid must resolve every oscillation: the
m± factors carry phases up to e^{2i lambda |x|} outside the potential window,
so the Nyquist rule uses 3(max|x| + max|y|) as the effective path length,
stricter than the bare |x-y| of the e^{i lambda(x-y)} factor.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..jost import JostField
from ..scattering import ScatteringData
from .dyadic import BandWindow

POINTS_PER_OSC = 8
MIN_BAND_POINTS = 48


class ResolutionError(ValueError):
    def __init__(self, msg, required_dk=None):
        super().__init__(msg)
        self.required_dk = required_dk


@dataclass
class OperatorKernel:
    values: np.ndarray          # (n_x, n_y)
    x: np.ndarray
    y: np.ndarray
    j: int | None
    window_tag: str
    k_grid: np.ndarray          # quadrature nodes used
    part: str = "ac"

    def symmetry_residual(self) -> float:
        """sup |K - K^T| on the common square (requires x == y grids)."""
        if len(self.x) != len(self.y) or not np.allclose(self.x, self.y):
            raise ValueError("symmetry check needs matching x and y grids")
        return float(np.max(np.abs(self.values - self.values.T)))

    def realness_residual(self) -> float:
        return float(np.max(np.abs(self.values.imag)))


def nyquist_dk(x, y) -> float:
    """Largest admissible quadrature step for the (x,y) window."""
    path = 3.0 * (np.max(np.abs(x)) + np.max(np.abs(y)))
    if path <= 0:
        return np.inf
    return 2.0 * np.pi / (POINTS_PER_OSC * path)


def band_k_grid(window: BandWindow, x, y,
                min_points: int = MIN_BAND_POINTS,
                refine_low: bool = True) -> np.ndarray:
    """Quadrature wavenumbers covering the window's lambda band.

    Bands reaching energy 0 include lambda = 0 and run at half the step
    everywhere (so the lowest quarter, where t(k) turns over fastest, is
    refined without a nonuniform junction: a step change would reintroduce
    uncancelled O(h^2) endpoint terms).
    """
    xi_lo, xi_hi = window.band
    lam_hi = np.sqrt(xi_hi)
    lam_lo = np.sqrt(max(xi_lo, 0.0))
    dk = min(nyquist_dk(x, y), (lam_hi - lam_lo) / max(min_points - 1, 1))
    if xi_lo > 0.0:
        n = int(np.ceil((lam_hi - lam_lo) / dk)) + 1
        return np.linspace(lam_lo, lam_hi, n)
    if refine_low:
        dk = dk / 2.0
    n = int(np.ceil(lam_hi / dk)) + 1
    return np.linspace(0.0, lam_hi, n)


def _band_columns(window: BandWindow, jost: JostField, scat: ScatteringData, x, y,
                  check_nyquist: bool):
    lam_lo = np.sqrt(max(window.band[0], 0.0))
    lam_hi = np.sqrt(window.band[1])
    k = jost.k_grid
    sel = np.nonzero((k >= lam_lo - 1e-12) & (k <= lam_hi + 1e-12))[0]
    if len(sel) < 2:
        raise ResolutionError(
            f"jost k-grid has {len(sel)} nodes in the band [{lam_lo:.4g}, {lam_hi:.4g}]")
    lam = k[sel]
    if check_nyquist:
        need = nyquist_dk(x, y)
        dk = np.max(np.diff(lam))
        if dk > need * (1 + 1e-9):
            raise ResolutionError(
                f"k-grid step {dk:.3e} under-resolves the oscillation; "
                f"need dk <= {need:.3e} on [{lam_lo:.4g}, {lam_hi:.4g}]",
                required_dk=need)
        if len(sel) < MIN_BAND_POINTS and window.band[0] > 0:
            raise ResolutionError(
                f"only {len(sel)} nodes across the band; need >= {MIN_BAND_POINTS}")
    return sel, lam


def _weights(lam: np.ndarray) -> np.ndarray:
    w = np.zeros_like(lam)
    d = np.diff(lam)
    w[:-1] += d / 2
    w[1:] += d / 2
    return w


def assemble_kernel(window: BandWindow, j: int | None,
                    scat: ScatteringData, jost: JostField,
                    x_grid, y_grid, check_nyquist: bool = True) -> OperatorKernel:
    """K(x,y) for the energy window over the given point sets.

    x_grid/y_grid are point arrays; interior points must lie on the Jost
    solver grid (exterior ones use the exact off-support continuation).
    Refuses under-resolved quadrature with the required density.
    """
    x = np.asarray(x_grid, dtype=float)
    y = np.asarray(y_grid, dtype=float)
    if window.is_empty():
        return OperatorKernel(np.zeros((len(x), len(y))), x, y, j, window.tag,
                              np.empty(0))
    sel, lam = _band_columns(window, jost, scat, x, y, check_nyquist)
    wvals = window(lam * lam)
    if np.max(np.abs(wvals)) == 0.0:
        return OperatorKernel(np.zeros((len(x), len(y))), x, y, j, window.tag, lam)
    c = _weights(lam) * wvals / np.pi

    mp = jost.sample_m_plus(x)[:, sel]
    mm = jost.sample_m_minus(y)[:, sel]
    t = scat.t[sel]
    A = (t[None, :] * mp) * np.exp(1j * np.outer(x, lam))
    B = mm * np.exp(-1j * np.outer(y, lam))
    vals = (A.real * c[None, :]) @ B.real.T - (A.imag * c[None, :]) @ B.imag.T
    if np.isrealobj(wvals) or np.max(np.abs(wvals.imag)) == 0.0:
        vals = vals.real if np.iscomplexobj(vals) else vals
    return OperatorKernel(vals, x, y, j, window.tag, lam)


def assemble_kernel_reflected(window: BandWindow, j: int | None,
                              scat: ScatteringData, jost: JostField,
                              x_grid, y_grid, side: int = +1,
                              check_nyquist: bool = True) -> OperatorKernel:
    """Same-side alternative assembly through the m+/m- interrelation.

    For x,y > 0 (side=+1) the t m- factor is rewritten as
    e^{2iky} r+ m+ + conj(m+), giving a reflection term in e^{i lambda (x+y)}
    plus a direct term; mirrored for side=-1. Cross-checks assemble_kernel.
    """
    x = np.asarray(x_grid, dtype=float)
    y = np.asarray(y_grid, dtype=float)
    if window.is_empty():
        return OperatorKernel(np.zeros((len(x), len(y))), x, y, j, window.tag,
                              np.empty(0))
    sel, lam = _band_columns(window, jost, scat, x, y, check_nyquist)
    wvals = window(lam * lam)
    c = _weights(lam) * wvals / np.pi
    if side == +1:
        mx = jost.sample_m_plus(x)[:, sel]
        my = jost.sample_m_plus(y)[:, sel]
        r = scat.r_plus[sel]
        A1 = (r[None, :] * mx) * np.exp(1j * np.outer(x, lam))
        B1 = my * np.exp(1j * np.outer(y, lam))
        A2 = mx * np.exp(1j * np.outer(x, lam))
        B2 = np.conj(my) * np.exp(-1j * np.outer(y, lam))
    else:
        mx = jost.sample_m_minus(x)[:, sel]
        my = jost.sample_m_minus(y)[:, sel]
        r = scat.r_minus[sel]
        A1 = (r[None, :] * mx) * np.exp(-1j * np.outer(x, lam))
        B1 = my * np.exp(-1j * np.outer(y, lam))
        A2 = np.conj(mx) * np.exp(1j * np.outer(x, lam))
        B2 = my * np.exp(-1j * np.outer(y, lam))
    vals = ((A1.real * c[None, :]) @ B1.real.T - (A1.imag * c[None, :]) @ B1.imag.T
            + (A2.real * c[None, :]) @ B2.real.T - (A2.imag * c[None, :]) @ B2.imag.T)
    if np.isrealobj(wvals) or np.max(np.abs(wvals.imag)) == 0.0:
        vals = vals.real if np.iscomplexobj(vals) else vals
    return OperatorKernel(vals, x, y, j, window.tag + "|reflected", lam)
