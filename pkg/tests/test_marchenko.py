import numpy as np
import pytest

from jostkit import (UniformGrid, density_a, density_b, m_plus_from_B,
                     nu_from_kernel, reference_potential, solve_marchenko,
                     t_inverse_resonant_form, weighted_B_bounds)


def test_free_kernel_is_zero():
    g = UniformGrid.symmetric(6.0, 0.05)
    V0 = reference_potential("free", {}, g)
    mk = solve_marchenko(V0)
    assert np.abs(mk.B_plus).max() == 0.0
    assert np.abs(mk.B_minus).max() == 0.0


def test_support_and_realness(well):
    mk = well["mk"]
    assert np.isrealobj(mk.B_plus) and np.isrealobj(mk.B_minus)
    assert np.all(mk.y_grid >= 0)          # B- stored against -y_grid <= 0


def test_residual(well, sech2):
    assert well["mk"].residual <= 8e-10
    assert sech2["mk"].residual <= 8e-10


def test_first_iterate_region_well(well):
    """Hand integration: first iterate of B+ is -(1 - (x+y)) on 0 < x+y < 1."""
    V, mk = well["V"], well["mk"]
    g = V.grid
    dy = g.dx
    norms = V.norms()
    for xv, yv in [(0.5, 0.2), (-0.3, 0.6), (0.0, 0.85)]:
        i, m = g.index_of(xv), int(round(yv / dy))
        first = -(1.0 - (xv + yv))
        # the full solution differs from the first iterate by the next Born term
        assert abs(mk.B_plus[i, m] - first) <= norms.tV_l1 * abs(first) + 1e-12
    # and B+ vanishes beyond the support shadow x + y > 1
    assert mk.B_plus[g.index_of(3.0), int(round(0.2 / dy))] == 0.0
    assert np.abs(mk.B_plus[g.index_of(9.5)]).max() == 0.0


def test_pointwise_envelope(well, sech2):
    for b in (well, sech2):
        mk = b["mk"]
        assert np.all(np.abs(mk.B_plus) <= mk.envelope_plus() * (1 + 1e-6) + 1e-10)
        assert np.all(np.abs(mk.B_minus) <= mk.envelope_minus() * (1 + 1e-6) + 1e-10)


def test_sech2_closed_form():
    """For V = -2 sech^2: B+(x,y) = -2 (1 - tanh x) e^{-2y} exactly."""
    g = UniformGrid.symmetric(16.0, 0.02)
    V = reference_potential("sech2", {"amplitude": -2.0, "scale": 1.0}, g)
    mk = solve_marchenko(V)
    x, y = g.points(), mk.y_grid
    exact = -2.0 * (1 - np.tanh(x))[:, None] * np.exp(-2 * y)[None, :]
    assert np.abs(mk.B_plus - exact).max() <= 1e-6


def test_fourier_consistency(well, sech2):
    ks = np.arange(0.25, 8.001, 0.25)
    xs = np.arange(-8.0, 8.001, 0.5)
    for b, gkey in ((well, "V"), (sech2, "V")):
        mk = b["mk"]
        f = b["jost"]
        gV = b["V"].grid
        mB = m_plus_from_B(mk, xs, ks)
        sel = [np.argmin(np.abs(b["k"] - kk)) for kk in ks]
        mJ = np.array([f.m_plus[gV.index_of(xv)][sel] for xv in xs])
        assert np.abs(mB - mJ).max() <= 1e-5


def test_weighted_bounds(well, sech2):
    for b, l1_2_flag in ((well, True), (sech2, True)):
        V = b["mk"].potential
        norms = V.norms()
        for n in (0, 1):
            tab = weighted_B_bounds(b["mk"], n)
            sup = max(tab["sup_ratio_plus"], tab["sup_ratio_minus"])
            assert np.isfinite(sup)
            assert sup <= np.exp(norms.tV_l1) * (1.0 + norms.l1_2)


def test_weighted_bounds_zero_for_free():
    g = UniformGrid.symmetric(6.0, 0.05)
    mk = solve_marchenko(reference_potential("free", {}, g))
    tab = weighted_B_bounds(mk, 0)
    assert tab["sup_ratio_plus"] == 0.0


def test_density_b_free_and_norm_bound(well):
    g = UniformGrid.symmetric(6.0, 0.05)
    V0 = reference_potential("free", {}, g)
    db0 = density_b(V0, solve_marchenko(V0))
    assert db0.l1 == 0.0

    V, mk = well["V"], well["mk"]
    db = density_b(V, mk)
    tab = weighted_B_bounds(mk, 0)
    fubini = V.norms().l1 * tab["table_plus"].max()
    assert db.l1 <= fubini * (1 + 1e-9)


def test_t_inverse_rebuild_high_k(well):
    """t(k)^{-1} = 1 - (nu0 + bhat(k))/(2ik) against the scattering module."""
    V, sc, mk, k = well["V"], well["scat"], well["mk"], well["k"]
    db = density_b(V, mk)
    ks = np.arange(2.0, 8.001, 0.5)
    bhat = db.transform(-2.0 * ks)
    tinv = 1.0 - (sc.nu0 + bhat) / (2j * ks)
    sel = [np.argmin(np.abs(k - kk)) for kk in ks]
    assert np.abs(tinv - 1.0 / sc.t[sel]).max() <= 1e-5


def test_nu_cross_check(well, sech2):
    for b, V in ((well, well["V"]), (sech2, sech2["V2"])):
        nu_b = nu_from_kernel(V, b["mk"])
        assert abs(nu_b - b["scat"].nu) <= 1e-6


def test_resonant_form(resonant_well):
    V, mk, scat = resonant_well["V"], resonant_well["mk"], resonant_well["scat"]
    ks = np.arange(0.1, 4.001, 0.1)
    ks = np.array([k for k in ks if np.any(np.abs(scat.k_grid - k) < 1e-9)])
    res = t_inverse_resonant_form(V, mk, ks, scat=scat)
    assert res["sup_diff"] <= 1e-4
    assert res["xi_density_l1"] <= res["xi_density_l1_bound"] * (1 + 1e-3)


def test_resonant_form_rejects_generic(well):
    with pytest.raises(ValueError):
        t_inverse_resonant_form(well["V"], well["mk"], np.array([0.5]),
                                scat=well["scat"])


def test_resonant_form_free_trivial(free8):
    g = free8["V"].grid
    mk = solve_marchenko(free8["V"])
    res = t_inverse_resonant_form(free8["V"], mk, np.array([0.5, 1.0]),
                                  scat=free8["scat"])
    assert abs(res["sup_diff"]) <= 1e-12


def test_density_a_series_numerator_values(well):
    # at s = 1 the density is exactly V(1-)/2 = -1/2 (A1 vanishes there)
    da = density_a(well["V"], well["mk"], +1, series_numerator=True)
    j = np.argmin(np.abs(da.x - 1.0))
    assert abs(da.values[j] + 0.5) < 1e-6
    assert np.isfinite(da.l1)
