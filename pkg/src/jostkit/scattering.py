"""Transmission/reflection coefficients, Wronskian, resonance classification.

Everything is computed from the displayed integral formulas

    t(k)^{-1}       = 1 - (1/2ik) int V(t) m±(t,k) dt          (either sign),
    r±(k) t(k)^{-1} = (1/2ik) int e^{∓2ikt} V(t) m∓(t,k) dt,

with W(k) = -2ik/t(k) evaluated through the division-free identity
W(k) = -2ik + int V m±, and nu = W(0) = int V(t) m+(t,0) dt. t is computed from
BOTH the m+ and m- integrals; their discrepancy is the primary self-consistency
diagnostic of the underlying Volterra solve.

k = 0 is never divided by: for nu != 0, t(0) = 0 and r±(0) = -1; in the
resonance case the limits use nu-subtracted difference quotients from the two
smallest nonzero grid wavenumbers.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .jost import JostField
from .potential import Potential, integrand_jumps
from .quadrature import full_integral, trapz


class ScatteringInconsistency(RuntimeError):
    pass


@dataclass
class ScatteringData:
    k_grid: np.ndarray
    t: np.ndarray
    r_plus: np.ndarray
    r_minus: np.ndarray
    W: np.ndarray
    nu: complex
    nu0: float
    resonance: bool
    resonance_threshold: float
    t_cross_discrepancy: float
    dt: np.ndarray | None = None
    dr_plus: np.ndarray | None = None
    dr_minus: np.ndarray | None = None
    potential_hash: str = ""

    def sample_at(self, k_values: np.ndarray) -> "ScatteringData":
        """Restriction to a subset of grid wavenumbers (exact node lookup)."""
        idx = _match_indices(self.k_grid, k_values)
        return ScatteringData(
            k_grid=self.k_grid[idx], t=self.t[idx], r_plus=self.r_plus[idx],
            r_minus=self.r_minus[idx], W=self.W[idx], nu=self.nu, nu0=self.nu0,
            resonance=self.resonance, resonance_threshold=self.resonance_threshold,
            t_cross_discrepancy=self.t_cross_discrepancy,
            potential_hash=self.potential_hash,
        )

    def export_csv(self, path):
        import csv

        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["k", "re_t", "im_t", "re_r_plus", "im_r_plus",
                        "re_r_minus", "im_r_minus", "unitarity_plus"])
            for i, k in enumerate(self.k_grid):
                u = abs(self.t[i]) ** 2 + abs(self.r_plus[i]) ** 2
                w.writerow([repr(float(k)),
                            repr(self.t[i].real), repr(self.t[i].imag),
                            repr(self.r_plus[i].real), repr(self.r_plus[i].imag),
                            repr(self.r_minus[i].real), repr(self.r_minus[i].imag),
                            repr(float(u))])

    def manifest(self) -> dict:
        return {
            "nu": [self.nu.real, self.nu.imag],
            "nu0": self.nu0,
            "resonance": bool(self.resonance),
            "resonance_threshold": self.resonance_threshold,
            "t_cross_discrepancy": self.t_cross_discrepancy,
            "potential_hash": self.potential_hash,
        }


def _match_indices(grid: np.ndarray, values: np.ndarray) -> np.ndarray:
    idx = []
    for v in np.atleast_1d(values):
        j = int(np.argmin(np.abs(grid - v)))
        if abs(grid[j] - v) > 1e-9 * max(1.0, abs(v)):
            raise ValueError(f"k = {v} is not on the scattering k-grid")
        idx.append(j)
    return np.asarray(idx, dtype=int)


def _weighted_V_integral(V: Potential, m, mp, phase_sign: float, k: np.ndarray):
    """int e^{i*phase_sign*2kt} V(t) m(t,k) dt with quadrature corrections.

    phase_sign = 0 gives the plain int V m integrals.
    """
    x = V.x
    dx = V.grid.dx
    v = V.samples[:, None]
    vp = V.deriv()[:, None]
    if phase_sign == 0.0:
        f = v * m
        fp = vp * m + v * mp
        J = integrand_jumps(V, m, mp, np.ones_like(m), np.zeros_like(m))
        return full_integral(f, dx, fp, J)
    w = np.exp(1j * phase_sign * 2.0 * np.outer(x, k))
    wp = 1j * phase_sign * 2.0 * k[None, :] * w
    f = w * v * m
    fp = (wp * v + w * vp) * m + w * v * mp
    J = integrand_jumps(V, m, mp, w, wp)
    return full_integral(f, dx, fp, J)


def scattering_coefficients(V: Potential, jost: JostField,
                            tol: float = 1e-10) -> ScatteringData:
    """Assemble t, r±, W, nu from a solved JostField.

    Raises ScatteringInconsistency when t-from-m+ and t-from-m- disagree by
    more than 100*tol (an under-resolved Volterra solve).
    """
    k = jost.k_grid
    kz = k == 0.0
    knz = ~kz

    I_plus = _weighted_V_integral(V, jost.m_plus, jost.mp_plus, 0.0, k)
    I_minus = _weighted_V_integral(V, jost.m_minus, jost.mp_minus, 0.0, k)
    J_plus = _weighted_V_integral(V, jost.m_minus, jost.mp_minus, -1.0, k)
    J_minus = _weighted_V_integral(V, jost.m_plus, jost.mp_plus, +1.0, k)

    nu0 = float(trapz(V.samples, V.grid.dx))
    # nu needs m+(.,0); fall back to a dedicated k=0 solve if absent
    if np.any(kz):
        nu = complex(I_plus[kz][0])
    else:
        from .jost import solve_jost

        f0 = solve_jost(V, np.array([0.0]), tol=jost.tol)
        nu = complex(_weighted_V_integral(V, f0.m_plus, f0.mp_plus, 0.0, f0.k_grid)[0])

    norms = V.norms()
    threshold = 1e-6 * (1.0 + norms.l1_1)
    resonant = abs(nu) < threshold

    with np.errstate(divide="ignore", invalid="ignore"):
        two_ik = 2j * np.where(kz, 1.0, k)
    tinv_p = 1.0 - I_plus / two_ik
    tinv_m = 1.0 - I_minus / two_ik

    t = np.empty_like(tinv_p)
    r_plus = np.empty_like(t)
    r_minus = np.empty_like(t)
    t[knz] = 2.0 / (tinv_p[knz] + tinv_m[knz])
    r_plus[knz] = t[knz] * J_plus[knz] / two_ik[knz]
    r_minus[knz] = t[knz] * J_minus[knz] / two_ik[knz]

    cross = np.abs(tinv_p[knz] - tinv_m[knz]) * np.abs(t[knz])
    cross_disc = float(cross.max()) if cross.size else 0.0
    if cross_disc > 100 * tol:
        raise ScatteringInconsistency(
            f"t from m+ and m- disagree by {cross_disc:.3e} (> {100*tol:.1e})")

    if np.any(kz):
        if not resonant:
            t[kz] = 0.0
            r_plus[kz] = -1.0
            r_minus[kz] = -1.0
        else:
            t0, rp0, rm0 = _resonant_k0_limits(k, I_plus, I_minus, J_plus, J_minus, nu)
            t[kz] = t0
            r_plus[kz] = rp0
            r_minus[kz] = rm0

    # W(k) = -2ik / t(k) = -2ik + int V m  (division-free; exact at k=0: W(0)=nu)
    W = -2j * k + 0.5 * (I_plus + I_minus)

    data = ScatteringData(
        k_grid=k.copy(), t=t, r_plus=r_plus, r_minus=r_minus, W=W,
        nu=nu, nu0=nu0, resonance=bool(resonant), resonance_threshold=threshold,
        t_cross_discrepancy=cross_disc, potential_hash=V.hash,
    )
    _attach_derivatives(data)
    return data


def _resonant_k0_limits(k, I_plus, I_minus, J_plus, J_minus, nu):
    """nu-subtracted difference-quotient limits of t, r± at k = 0.

    With nu = int V m±(.,0) and I(k) = int V m±(.,k), the resonant limit is
    t(0)^{-1} = 1 - lim (I(k)-nu)/(2ik). The quotient has an O(k) error, so it
    is Richardson-refined from the two smallest distinct nonzero |k| on the
    grid. Same treatment for the r± numerators (which share the k=0 value nu).
    """
    knz_idx = np.nonzero(k != 0)[0]
    order = knz_idx[np.argsort(np.abs(k[knz_idx]))]
    i1 = order[0]
    I = 0.5 * (I_plus + I_minus)

    def quotient(F, i):
        return (F[i] - nu) / (2j * k[i])

    def limit(F):
        q1 = quotient(F, i1)
        for i2 in order[1:]:
            k1, k2 = abs(k[i1]), abs(k[i2])
            if k2 > k1 * (1 + 1e-9):
                q2 = quotient(F, i2)
                return (k2 * q1 - k1 * q2) / (k2 - k1)
        return q1

    qt, qp, qm = limit(I), limit(J_plus), limit(J_minus)
    t0 = 1.0 / (1.0 - qt)
    return t0, t0 * qp, t0 * qm


def _attach_derivatives(data: ScatteringData):
    """Central-difference d/dk of t, r± on the grid (nonuniform-safe)."""
    if len(data.k_grid) < 3:
        return
    data.dt = np.gradient(data.t, data.k_grid)
    data.dr_plus = np.gradient(data.r_plus, data.k_grid)
    data.dr_minus = np.gradient(data.r_minus, data.k_grid)


def alpha(V: Potential, jost: JostField, sign: int, scat: ScatteringData | None = None):
    """alpha±(k) = (1 + r±(k)) t(k)^{-1} on the nonzero-k columns.

    Returns (k_nonzero, alpha values). Consistency alpha±*t - 1 = r± holds by
    construction through the shared integrals; the decomposition cross-check
    against Marchenko densities lives in the marchenko module.
    """
    if scat is None:
        scat = scattering_coefficients(V, jost)
    knz = scat.k_grid != 0
    r = scat.r_plus if sign > 0 else scat.r_minus
    a = (1.0 + r[knz]) / scat.t[knz]
    return scat.k_grid[knz], a


def k0_threshold(nu0: float, b_l1: float, k_grid: np.ndarray | None = None) -> float:
    """Smallest admissible k0 > 1 with (|nu0| + ||b||_1)/(2 k0) <= 1/2.

    With a k-grid supplied, the smallest grid value satisfying both
    constraints; otherwise the continuous threshold itself.
    """
    need = max(1.0, abs(nu0) + b_l1)
    if k_grid is None:
        return float(need) if need > 1.0 else float(np.nextafter(1.0, 2.0))
    ks = np.sort(np.abs(np.asarray(k_grid)[np.asarray(k_grid) != 0]))
    for k in ks:
        if k > 1.0 and need / (2.0 * k) <= 0.5:
            return float(k)
    raise ValueError(f"k-grid has no admissible k0 (extend it beyond {need:.3f})")


def j0_index(k0: float, dsigma_mass: float) -> int:
    """j0 = max(2 + [2 log2 k0], ceil(2 log2 ||dsigma||)), floored when ||dsigma|| < 1."""
    base = 2 + math.floor(2.0 * math.log2(k0))
    if dsigma_mass >= 1.0:
        return max(base, math.ceil(2.0 * math.log2(dsigma_mass)))
    return 2 + math.ceil(2.0 * math.log2(k0))


@dataclass
class BornSeriesData:
    k0: float
    norm_b_l1: float
    norm_a_plus_l1: float
    norm_a_minus_l1: float
    order: int


def born_series_high(V: Potential, mk, k_values, N: int = 20):
    """High-energy geometric series for t and r± at |k| > k0.

    mk is a solved MarchenkoKernel (both B± are needed: the t series uses the
    B+ density b, the r± numerators use the B∓ double-integral densities).
    Returns (t_N, r+_N, r-_N, info) with info carrying k0, N and the per-term
    ratio bound (|nu0| + ||b||_1)/(2|k|).

    Raises ValueError below k0.
    """
    from .marchenko import density_a, density_b

    k = np.atleast_1d(np.asarray(k_values, dtype=float))
    nu0 = float(trapz(V.samples, V.grid.dx))
    db = density_b(V, mk)
    k0 = k0_threshold(nu0, db.l1)
    if np.any(np.abs(k) <= k0):
        raise ValueError(f"born_series_high requires |k| > k0 = {k0:.3f}")

    bhat = db.transform(-2.0 * k)            # int_0^inf b(y) e^{2iky} dy
    z = (nu0 + bhat) / (2j * k)
    # partial sums sum_{n<=N} z^n and sum_{n<N} z^n
    tN = np.ones_like(z)
    tNm1 = np.zeros_like(z)
    zp = np.ones_like(z)
    for n in range(1, N + 1):
        tNm1 = tN.copy() if n == N else tNm1
        zp = zp * z
        tN = tN + zp
    if N == 0:
        tNm1 = np.zeros_like(z)

    qp = density_a(V, mk, +1, series_numerator=True)
    qm = density_a(V, mk, -1, series_numerator=True)
    qp_hat = qp.transform(2.0 * k)           # qhat+(2k)  [e^{-2iks} weight]
    qm_hat = qm.transform(-2.0 * k)          # qhat-(-2k) [e^{+2iks} weight]
    rpN = (qp_hat / (2j * k)) * tNm1
    rmN = (qm_hat / (2j * k)) * tNm1

    info = BornSeriesData(k0=k0, norm_b_l1=db.l1, norm_a_plus_l1=qp.l1,
                          norm_a_minus_l1=qm.l1, order=N)
    return tN, rpN, rmN, info


def born_series_terms(V: Potential, mk, k: float, N: int):
    """|n-th term| of the t series at one k, for the geometric-ratio check."""
    from .marchenko import density_b

    nu0 = float(trapz(V.samples, V.grid.dx))
    db = density_b(V, mk)
    bhat = db.transform(np.array([-2.0 * k]))[0]
    z = (nu0 + bhat) / (2j * k)
    return np.abs(z) ** np.arange(N + 1), (abs(nu0) + db.l1) / (2.0 * abs(k))


def interrelation_residual(jost: JostField, scat: ScatteringData,
                           x_values=None, k_values=None):
    """Sup-norm residuals of the two m+/m- interrelations.

        t m-(x,k) = e^{ 2ikx} r+(k) m+(x,k) + m+(x,-k)
        t m+(x,k) = e^{-2ikx} r-(k) m-(x,k) + m-(x,-k)

    m±(x,-k) = conj(m±(x,k)) for real V and real k. Returns (res1, res2).
    """
    x = jost.x_grid.points() if x_values is None else np.asarray(x_values, float)
    if k_values is None:
        sel = np.arange(len(jost.k_grid))
    else:
        sel = _match_indices(jost.k_grid, np.asarray(k_values, float))
    xi = np.array([jost.x_grid.index_of(v) for v in x])
    k = jost.k_grid[sel]
    mp = jost.m_plus[np.ix_(xi, sel)]
    mm = jost.m_minus[np.ix_(xi, sel)]
    t = scat.t[sel]
    rp = scat.r_plus[sel]
    rm = scat.r_minus[sel]
    e2 = np.exp(2j * np.outer(x, k))
    res1 = np.abs(t * mm - (e2 * rp * mp + np.conj(mp)))
    res2 = np.abs(t * mp - (np.conj(e2) * rm * mm + np.conj(mm)))
    return float(res1.max()), float(res2.max())


def classify_resonance(scat: ScatteringData, threshold: float | None = None,
                       mk=None, V: Potential | None = None):
    """Resonance dichotomy from nu = W(0), with optional B+ cross-check.

    Returns dict {resonant, nu, nu_marchenko, threshold}. When a Marchenko
    kernel and potential are supplied, nu is recomputed as
    int V (1 + int_0^inf B+ dy) and a >1e-6 mismatch raises.
    """
    thr = scat.resonance_threshold if threshold is None else threshold
    nu_b = None
    if mk is not None and V is not None:
        from .marchenko import nu_from_kernel

        nu_b = nu_from_kernel(V, mk)
        if abs(nu_b - scat.nu) > 1e-6 * max(1.0, abs(scat.nu)):
            raise ScatteringInconsistency(
                f"nu from m+ ({scat.nu:.3e}) and from B+ ({nu_b:.3e}) disagree")
    return {
        "resonant": bool(abs(scat.nu) < thr),
        "nu": scat.nu,
        "nu_marchenko": nu_b,
        "threshold": thr,
    }


def scattering_asymptotics_report(scat: ScatteringData,
                                  low_window=(0.05, 0.5),
                                  high_window=(1.0, 8.0)) -> dict:
    """Fitted k-exponents of dt, dr± plus the bounded quantities of the
    low/high asymptotics: sup |k dt|, |k dr±| on the low window and
    sup |k^2 dt| on the high window (finiteness is the claim; values reported).
    """
    k = scat.k_grid
    out = {}
    for name, d in (("dt", scat.dt), ("dr_plus", scat.dr_plus),
                    ("dr_minus", scat.dr_minus)):
        if d is None:
            continue
        entry = {}
        for wname, (a, b) in (("low", low_window), ("high", high_window)):
            sel = (k >= a) & (k <= b) & (np.abs(d) > 0)
            if sel.sum() >= 3:
                slope, intercept = np.polyfit(np.log(k[sel]), np.log(np.abs(d[sel])), 1)
                entry[wname + "_exponent"] = float(slope)
                entry[wname + "_intercept"] = float(intercept)
        lowsel = (k >= low_window[0]) & (k <= low_window[1])
        highsel = (k >= high_window[0]) & (k <= high_window[1])
        if lowsel.any():
            entry["sup_k_d_low"] = float(np.max(np.abs(k[lowsel] * d[lowsel])))
        if highsel.any():
            entry["sup_k2_d_high"] = float(np.max(np.abs(k[highsel] ** 2 * d[highsel])))
        out[name] = entry
    return out
