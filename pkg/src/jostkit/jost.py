"""Modified Jost functions m±(x,k) by Born iteration of their Volterra equations.

The equations solved are

    m+(x,k) = 1 + int_x^inf  h(t-x, k) V(t) m+(t,k) dt,
    m-(x,k) = 1 + int_-inf^x h(x-t, k) V(t) m-(t,k) dt,

with the Green factor h(u,k) = (e^{2iku} - 1)/(2ik), h(u,0) = u. Successive
substitution converges unconditionally: the n-th iterate is bounded by the
ordered-simplex volume ||(1+|t|)V||_1^n / n!, so a few dozen sweeps reach any
fixed tolerance. Writing h(t-x,k) = (e^{-2ikx} e^{2ikt} - 1)/(2ik) reduces each
sweep to suffix cumulative integrals, O(1) per node, vectorized over all k
columns at once.

k-derivatives solve the differentiated Volterra equation (same kernel, new
inhomogeneity from d_k h); the k = 0 column uses h(u,0) = u exactly, but its
derivative column is left unset and flagged, since the d_k m bounds degenerate
there.

m- is obtained from the m+ solver on the reflected potential:
m-(x,k; V) = m+(-x,k; V(-.)).
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .grids import UniformGrid
from .potential import Potential, integrand_jumps
from .quadrature import Jump, full_integral, suffix_integral

N_MAX_DEFAULT = 64


class JostConvergenceError(RuntimeError):
    def __init__(self, residual, n_max):
        super().__init__(f"Born iteration did not reach tolerance in {n_max} sweeps "
                         f"(last update {residual:.3e})")
        self.residual = residual


def green_factor(u, k):
    """h(u,k) = (e^{2iku}-1)/(2ik) = sin(ku) e^{iku}/k; h(u,0)=u.

    The sin form is exact for real k and avoids cancellation at small |ku|.
    Broadcasts over arrays.
    """
    u = np.asarray(u, dtype=float)
    k = np.asarray(k, dtype=float)
    out = np.empty(np.broadcast(u, k).shape, dtype=complex)
    kk = np.broadcast_to(k, out.shape)
    uu = np.broadcast_to(u, out.shape)
    nz = kk != 0
    ku = kk[nz] * uu[nz]
    out[nz] = np.sin(ku) * np.exp(1j * ku) / kk[nz]
    out[~nz] = uu[~nz]
    return out


def green_factor_dk(u, k):
    """d_k h(u,k) = (u e^{2iku} - h(u,k))/k, k != 0."""
    u = np.asarray(u, dtype=float)
    k = np.asarray(k, dtype=float)
    if np.any(k == 0):
        raise ValueError("d_k h is not evaluated at k = 0")
    return (u * np.exp(2j * k * u) - green_factor(u, k)) / k


@dataclass
class JostField:
    """m±, d_k m± and bookkeeping on an (x-grid x k-grid) rectangle.

    ext_plus / ext_minus hold the closed-form continuation coefficients on the
    side where the Volterra tail is empty: for x below the window
    m+(x,k) = c0(k) + c1(k) e^{-2ikx}, and m+ = 1 above it (mirrored for m-).
    """

    potential: Potential
    x_grid: UniformGrid
    k_grid: np.ndarray
    m_plus: np.ndarray          # (n_x, n_k) complex
    m_minus: np.ndarray
    mp_plus: np.ndarray         # d/dx m+ (needed for quadrature corrections downstream)
    mp_minus: np.ndarray
    dm_plus: np.ndarray | None = None   # d/dk m+
    dm_minus: np.ndarray | None = None
    iteration_count: np.ndarray | None = None   # per-k sweeps to tolerance
    residual: np.ndarray | None = None          # per-(x,k) Volterra residual
    tol: float = 1e-10
    k0_flagged: bool = False
    ext_plus: tuple | None = None
    ext_minus: tuple | None = None

    @property
    def k_zero_columns(self) -> np.ndarray:
        return np.nonzero(self.k_grid == 0.0)[0]

    def sample_m_plus(self, x: np.ndarray) -> np.ndarray:
        return _sample(self, x, plus=True)

    def sample_m_minus(self, x: np.ndarray) -> np.ndarray:
        return _sample(self, x, plus=False)


def _sample(field: JostField, x, plus: bool):
    """m±(x, k) for every grid k at arbitrary x.

    x inside the potential's support must land on solver nodes (no
    interpolation: the oscillatory columns would lose accuracy); outside the
    support the exact off-support continuation applies, so off-grid and
    out-of-window points are fine there.
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    g = field.x_grid
    k = field.k_grid
    kz = k == 0.0
    a_supp, b_supp = field.potential.support_bounds()
    empty = not np.any(field.potential.samples)
    out = np.empty((len(x), len(k)), dtype=complex)
    for i, xi in enumerate(x):
        on_node = False
        if g.x0 - 1e-9 <= xi <= g.x1 + 1e-9:
            idx = round((xi - g.x0) / g.dx)
            on_node = abs(g.x0 + idx * g.dx - xi) <= 1e-9 * max(1.0, abs(xi))
        if on_node:
            out[i] = (field.m_plus if plus else field.m_minus)[int(idx)]
        elif empty or (plus and xi >= b_supp) or ((not plus) and xi <= a_supp):
            out[i] = 1.0
        elif plus and xi <= a_supp:
            c0, c1, l0, l1 = field.ext_plus
            out[i] = c0 + c1 * np.exp(-2j * k * xi)
            if np.any(kz):
                out[i, kz] = l0[kz] + l1[kz] * xi
        elif (not plus) and xi >= b_supp:
            c0, c1, l0, l1 = field.ext_minus
            out[i] = c0 + c1 * np.exp(2j * k * xi)
            if np.any(kz):
                out[i, kz] = l0[kz] - l1[kz] * xi
        else:
            raise ValueError(
                f"x = {xi} lies inside the potential support but off the solver grid")
    return out


def _born_sweeps(V: Potential, k: np.ndarray, tol: float, n_max: int):
    """Born iteration for m+ on V's own grid, all k columns at once.

    Returns (m, mp, S1, iterations, residual) where mp = d/dx m and S1 is the
    suffix integral of e^{2ikt} V m needed by derivative formulas.
    """
    x = V.x
    dx = V.grid.dx
    v = V.samples[:, None]
    vp = V.deriv()[:, None]
    n_x, n_k = len(x), len(k)

    kz = k == 0.0
    knz = ~kz
    kc = k[None, :]
    with np.errstate(divide="ignore", invalid="ignore"):
        inv2ik = np.where(knz[None, :], 1.0 / (2j * np.where(kz, 1.0, k))[None, :], 0.0)
    e2 = np.exp(2j * np.outer(x, k))          # e^{2ikx}
    e2c = np.conj(e2)

    m = np.ones((n_x, n_k), dtype=complex)
    mp = np.zeros_like(m)
    iterations = np.zeros(n_k, dtype=int)
    converged = np.zeros(n_k, dtype=bool)
    S1 = np.zeros_like(m)

    def apply(mm, mmp):
        """One Volterra application: returns (new m, new mp, S1 used)."""
        f1 = e2 * (v * mm)
        fp1 = e2 * ((2j * kc * v + vp) * mm + v * mmp)
        J1 = integrand_jumps(V, mm, mmp, e2, 2j * kc * e2)
        s1 = suffix_integral(f1, dx, fp1, J1)

        f2 = v * mm
        fp2 = vp * mm + v * mmp
        J2 = integrand_jumps(V, mm, mmp, np.ones_like(m), np.zeros_like(m))
        s2 = suffix_integral(f2, dx, fp2, J2)

        new = 1.0 + (e2c * s1 - s2) * inv2ik
        newp = -e2c * s1

        if np.any(kz):
            # k = 0: h(u,0) = u, so the update is S3 - x S2 with S3 = int t V m
            tcol = x[:, None]
            f3 = tcol * f2
            fp3 = f2 + tcol * fp2
            J3 = integrand_jumps(V, mm, mmp, tcol * np.ones_like(m), np.ones_like(m))
            s3 = suffix_integral(f3, dx, fp3, J3)
            new[:, kz] = 1.0 + s3[:, kz] - tcol * s2[:, kz]
            newp[:, kz] = -s2[:, kz]
        return new, newp, s1

    for it in range(1, n_max + 1):
        new, newp, S1 = apply(m, mp)
        delta = np.max(np.abs(new - m), axis=0)
        newly = (~converged) & (delta <= tol)
        iterations[newly] = it
        converged |= newly
        m, mp = new, newp
        if np.all(converged):
            break
    check, _, S1 = apply(m, mp)
    residual = np.abs(check - m)
    if residual.max() > tol * 8:
        raise JostConvergenceError(residual.max(), n_max)
    return m, mp, S1, iterations, residual


def solve_jost(V: Potential, k_grid, x_grid: UniformGrid | None = None,
               tol: float = 1e-10, n_max: int = N_MAX_DEFAULT,
               derivatives: bool = False) -> JostField:
    """Solve both Volterra equations on (x_grid x k_grid).

    x_grid defaults to (and currently must equal) the potential's grid: the
    suffix integrals live there. k may contain 0 (flagged).
    """
    k = np.asarray(k_grid, dtype=float)
    if x_grid is None:
        x_grid = V.grid
    if x_grid.spec() != V.grid.spec():
        raise ValueError("solve_jost runs on the potential's own grid")
    if tol <= 0:
        raise ValueError("tol must be positive")

    mplus, mpplus, S1p, it_p, res_p = _born_sweeps(V, k, tol, n_max)
    Vr = V.reflected()
    mref, mpref, S1m, it_m, res_m = _born_sweeps(Vr, k, tol, n_max)
    mminus = mref[::-1]
    mpminus = -mpref[::-1]

    field = JostField(
        potential=V, x_grid=x_grid, k_grid=k,
        m_plus=mplus, m_minus=mminus, mp_plus=mpplus, mp_minus=mpminus,
        iteration_count=np.maximum(it_p, it_m),
        residual=np.maximum(res_p, res_m),
        tol=tol, k0_flagged=bool(np.any(k == 0.0)),
    )
    field.ext_plus = _extension(V, k, mplus, mpplus)
    # m-(x,k; V) = m+(-x,k; Vr): same coefficients, phase e^{+2ikx}, slope -x
    field.ext_minus = _extension(Vr, k, mref, mpref)
    if derivatives:
        jost_derivative(V, field, tol=tol, n_max=n_max)
    return field


def _extension(V, k, m, mp):
    """Continuation coefficients below the window.

    For k != 0:  m+(x,k) = c0 + c1 e^{-2ikx};  for k = 0:  m+(x,0) = l0 + l1 x.
    """
    x = V.x
    dx = V.grid.dx
    v = V.samples[:, None]
    vp = V.deriv()[:, None]
    kc = k[None, :]
    e2 = np.exp(2j * np.outer(x, k))
    f1 = e2 * (v * m)
    fp1 = e2 * ((2j * kc * v + vp) * m + v * mp)
    J1 = integrand_jumps(V, m, mp, e2, 2j * kc * e2)
    s1_full = full_integral(f1, dx, fp1, J1)
    f2 = v * m
    fp2 = vp * m + v * mp
    J2 = integrand_jumps(V, m, mp, np.ones_like(m), np.zeros_like(m))
    s2_full = full_integral(f2, dx, fp2, J2)
    kz = k == 0
    inv2ik = np.where(kz, 0.0, 1.0 / (2j * np.where(kz, 1.0, k)))
    c0 = 1.0 - s2_full * inv2ik
    c1 = s1_full * inv2ik
    l0 = np.zeros_like(c0)
    l1 = np.zeros_like(c0)
    if np.any(kz):
        tcol = x[:, None]
        f3 = tcol * f2
        fp3 = f2 + tcol * fp2
        J3 = integrand_jumps(V, m, mp, tcol * np.ones_like(m), np.ones_like(m))
        s3_full = full_integral(f3, dx, fp3, J3)
        l0 = 1.0 + s3_full
        l1 = -s2_full
    return (c0, c1, l0, l1)


def jost_derivative(V: Potential, field: JostField, tol: float = 1e-10,
                    n_max: int = N_MAX_DEFAULT) -> JostField:
    """Fill dm± = d_k m± by Born iteration of the differentiated equations.

    Columns with k = 0 are left NaN and the field keeps its flag; the paper's
    derivative bounds require k != 0.
    """
    k = field.k_grid
    dmp = _derivative_one_side(V, k, field.m_plus, field.mp_plus, tol, n_max)
    Vr = V.reflected()
    mref = field.m_minus[::-1]
    mpref = -field.mp_minus[::-1]
    dmm = _derivative_one_side(Vr, k, mref, mpref, tol, n_max)[::-1]
    field.dm_plus = dmp
    field.dm_minus = dmm
    return field


def _derivative_one_side(V, k, m, mp, tol, n_max):
    x = V.x
    dx = V.grid.dx
    v = V.samples[:, None]
    vp = V.deriv()[:, None]
    n_x, n_k = m.shape
    kz = k == 0.0
    kc = k[None, :]
    with np.errstate(divide="ignore", invalid="ignore"):
        inv2ik = np.where(kz[None, :], 0.0, 1.0 / (2j * np.where(kz, 1.0, k))[None, :])
        invk = np.where(kz[None, :], 0.0, 1.0 / np.where(kz, 1.0, k)[None, :])
    e2 = np.exp(2j * np.outer(x, k))
    e2c = np.conj(e2)
    tcol = x[:, None]

    # inhomogeneity g = int d_k h(t-x) V m = (1/k)[e^{-2ikx}(S3 - x S1) - (e^{-2ikx}S1 - S2)/(2ik)]
    f1 = e2 * (v * m)
    fp1 = e2 * ((2j * kc * v + vp) * m + v * mp)
    J1 = integrand_jumps(V, m, mp, e2, 2j * kc * e2)
    S1 = suffix_integral(f1, dx, fp1, J1)
    f2 = v * m
    fp2 = vp * m + v * mp
    J2 = integrand_jumps(V, m, mp, np.ones_like(m), np.zeros_like(m))
    S2 = suffix_integral(f2, dx, fp2, J2)
    f3 = tcol * f1
    fp3 = f1 + tcol * fp1
    J3 = integrand_jumps(V, m, mp, tcol * e2, e2 * (1.0 + 2j * kc * tcol))
    S3 = suffix_integral(f3, dx, fp3, J3)

    g = invk * (e2c * (S3 - tcol * S1) - (e2c * S1 - S2) * inv2ik)
    gp = -2j * e2c * (S3 - tcol * S1) * invk * kc   # = -2i e^{-2ikx}(S3 - x S1)

    dm = g.copy()
    dmp = gp.copy()
    for _ in range(n_max):
        f1d = e2 * (v * dm)
        fp1d = e2 * ((2j * kc * v + vp) * dm + v * dmp)
        J1d = integrand_jumps(V, dm, dmp, e2, 2j * kc * e2)
        s1 = suffix_integral(f1d, dx, fp1d, J1d)
        f2d = v * dm
        fp2d = vp * dm + v * dmp
        J2d = integrand_jumps(V, dm, dmp, np.ones_like(m), np.zeros_like(m))
        s2 = suffix_integral(f2d, dx, fp2d, J2d)
        new = g + (e2c * s1 - s2) * inv2ik
        newp = gp - e2c * s1
        delta = np.max(np.abs(new - dm))
        dm, dmp = new, newp
        if delta <= tol:
            break
    dm[:, kz] = np.nan
    return dm


def volterra_terms(V: Potential, k: float, n_max: int) -> np.ndarray:
    """Iterates M_n^-(x,k), n = 0..n_max, of the m-(x,-k) Volterra expansion.

    Returns an (n_max+1, n_x) array on V's grid; partial sums converge to
    m-(x,-k). M_0 = 1; each term is one application of the h(.,-k) kernel to
    the previous one via prefix integrals on the reflected-solver machinery.
    """
    x = V.x
    dx = V.grid.dx
    v = V.samples
    vp = V.deriv()
    n_x = len(x)
    out = np.empty((n_max + 1, n_x), dtype=complex)
    out[0] = 1.0

    from .quadrature import prefix_integral

    e2 = np.exp(-2j * k * x)      # e^{-2ikx}
    e2c = np.conj(e2)
    term = np.ones(n_x, dtype=complex)
    termp = np.zeros(n_x, dtype=complex)
    for n in range(1, n_max + 1):
        # M_{n} (x) = int_{-inf}^x h(x-t,-k) V M_{n-1} dt
        #           = (1/-2ik)[e^{-2ikx} P1 - P2],  P1 = int e^{2ikt} V M, P2 = int V M
        if k != 0.0:
            f1 = e2c * v * term
            fp1 = e2c * ((2j * k * v + vp) * term + v * termp)
            J1 = integrand_jumps(V, term, termp, e2c, 2j * k * e2c)
            P1 = prefix_integral(f1, dx, fp1, J1)
            f2 = v * term
            fp2 = vp * term + v * termp
            J2 = integrand_jumps(V, term, termp, np.ones(n_x), np.zeros(n_x))
            P2 = prefix_integral(f2, dx, fp2, J2)
            new = (e2 * P1 - P2) / (-2j * k)
            newp = e2 * P1
        else:
            f2 = v * term
            fp2 = vp * term + v * termp
            J2 = integrand_jumps(V, term, termp, np.ones(n_x), np.zeros(n_x))
            P2 = prefix_integral(f2, dx, fp2, J2)
            f3 = x * v * term
            fp3 = v * term + x * fp2
            J3 = integrand_jumps(V, term, termp, x, np.ones(n_x))
            P3 = prefix_integral(f3, dx, fp3, J3)
            new = x * P2 - P3
            newp = P2
        out[n] = new
        term, termp = new, newp
    return out
