"""Kernel tail integrals for the Hoermander-condition blocks.

For a cube I of length t = 2^{-j_I/2} containing y, the checked quantities are

    T_j = int_{|x-y| >= 2t} |(mu_j (1 - Phi_{j_I}))(H)(x,y)| dx,

their geometric decay in j (claimed rate (s - 1/2)/2 in the decay-rate
convention, from (2^{j/2} t)^{1/2 - s} with n = 1) and the boundedness of the
j-sum by a multiple of the Hoermander norm. The support arithmetic makes the
window identically zero for j <= j_I - 1, which the harness asserts exactly.
"""
from __future__ import annotations

import numpy as np

from ..potential import Potential
from ..quadrature import trapz
from ..speccalc.hnorm import hoermander_norm
from ..speccalc.kernels import assemble_kernel
from ..speccalc.spectral import SpectralCalculator
from .report import EstimateReport, timed


def check_kernel_tail_L1(mu, V: Potential, interval: tuple, j_I: int, j_range,
                         s: float = 1.0,
                         calc: SpectralCalculator | None = None,
                         width_factor: float = 80.0,
                         mu_hoermander: float | None = None,
                         slope_tol: float = 0.1) -> EstimateReport:
    """Per-j tail integrals, slope fit, and the j-sum bound.

    interval is the cube (a, b) with y at its center; its length must equal
    2^{-j_I/2} (checked). Blocks entirely below the cutoff are asserted to
    vanish identically.
    """
    if calc is None:
        calc = SpectralCalculator(V)
    sysd = calc.system
    a, b = interval
    t = b - a
    if abs(t - 2.0 ** (-j_I / 2.0)) > 1e-9 * max(1.0, t):
        raise ValueError(f"interval length {t} is not 2^(-j_I/2) for j_I={j_I}")
    y = 0.5 * (a + b)
    rep = EstimateReport(estimate_id=f"kernel_tails_jI{j_I}",
                         slope_claimed=(s - 0.5) / 2.0, slope_tol=slope_tol)
    with timed(rep):
        js = list(j_range)
        live = []
        for j in js:
            win = sysd.window_tail(j, j_I).times(mu, tag=f"mu*phi_{j}(1-Phi_{j_I})")
            if win.is_empty() or j <= j_I - 1:
                # support arithmetic: phi_j lives below the (1 - Phi_{j_I}) cutoff
                probe = np.geomspace(max(win.band[0], 2.0 ** (j - 2)), 2.0 ** j, 33)
                assert np.max(np.abs(sysd.phi_j(j, probe)
                                     * (1.0 - sysd.Phi_j(j_I, probe)))) == 0.0
                rep.rows.append({"j": j, "tail": 0.0, "exact_zero": True})
                continue
            half = max(width_factor * 2.0 ** (-j / 2.0), 8.0 * t, 4.0)
            dxs = _snap_step(V, max(2.0 ** (-j / 2.0) / 12.0, V.grid.dx))
            x = _aligned_line(V, y, half, dxs)
            jost, scat = calc.band_data(win, x, [y])
            K = assemble_kernel(win, j, scat, jost, x, [y])
            row = np.abs(K.values[:, 0])
            mask = np.abs(x - y) >= 2 * t
            tail = float(trapz(np.where(mask, row, 0.0), dxs))
            live.append((j, tail))
            rep.rows.append({"j": j, "tail": tail, "exact_zero": False})
        if len(live) >= 3:
            jj = np.array([p[0] for p in live], dtype=float)
            tt = np.array([max(p[1], 1e-300) for p in live])
            coef = np.polyfit(jj, np.log2(tt), 1)
            rep.slope = float(-coef[0])
            rep.intercept = float(coef[1])
        total = float(sum(p[1] for p in live))
        if mu_hoermander is None:
            mu_hoermander = hoermander_norm(mu, max(s, 0.75))["norm"]
        rep.sup_ratio = total / mu_hoermander
        rep.extras = {"j_sum": total, "hoermander_norm": mu_hoermander,
                      "t": t, "y": y}
        ok = np.isfinite(total)
        if rep.slope is not None and rep.slope_claimed is not None:
            ok = ok and abs(rep.slope - rep.slope_claimed) <= slope_tol
        rep.criterion = (f"vanishing below j_I exact; decay-rate slope within "
                         f"{slope_tol} of {(s-0.5)/2.0}; finite j-sum/Hoermander ratio")
        rep.passed = bool(ok)
    return rep


def _snap_step(V: Potential, step: float) -> float:
    if V.analytic_tag == "free":
        return step
    stride = max(1, int(round(step / V.grid.dx)))
    return stride * V.grid.dx


def _aligned_line(V: Potential, y: float, half: float, step: float) -> np.ndarray:
    m = int(np.ceil(half / step))
    if V.analytic_tag == "free":
        return y + step * np.arange(-m, m + 1)
    y0 = round(y / V.grid.dx) * V.grid.dx
    return y0 + step * np.arange(-m, m + 1)
