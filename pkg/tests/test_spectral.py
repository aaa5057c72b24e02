import numpy as np
import pytest

from jostkit import UniformGrid, reference_potential
from jostkit.quadrature import trapz
from jostkit.speccalc import (SpectralCalculator, apply_multiplier, bound_states,
                              hoermander_norm, make_dyadic, multiplier)
from jostkit.speccalc.hnorm import chi_default, sobolev_norm

from .oracles import crank_nicolson_heat, fd5_negative_eigenvalues, well_bound_state_energies


@pytest.fixture(scope="module")
def well_calc(well):
    return SpectralCalculator(well["V"])


def test_sech2_single_bound_state_vs_oracle():
    g = UniformGrid.symmetric(16.0, 0.01)
    V = reference_potential("sech2", {"amplitude": -2.0, "scale": 1.0}, g)
    bs = bound_states(V)
    assert bs.count == 1
    assert abs(bs.energies[0] + 1.0) <= 1e-4
    g2 = UniformGrid.symmetric(16.0, 0.02)
    V2 = reference_potential("sech2", {"amplitude": -2.0, "scale": 1.0}, g2)
    oracle = fd5_negative_eigenvalues(V2.samples, g2.dx)
    assert len(oracle) == 1
    assert abs(oracle[0] + 1.0) <= 1e-4           # the oracle confirms -1
    assert abs(bs.energies[0] - oracle[0]) <= 2e-4


def test_well_bound_state_vs_transcendental(well):
    bs = bound_states(well["V"])
    exact = well_bound_state_energies(-1.0, 2.0)
    assert bs.count == len(exact) == 1
    assert abs(bs.energies[0] - exact[0]) <= 1e-6


def test_nonnegative_potential_has_none():
    g = UniformGrid.symmetric(8.0, 0.01)
    V = reference_potential("gaussian", {"amplitude": 1.0, "width": 1.0}, g)
    assert bound_states(V).count == 0


def test_bound_state_residual_and_tail(well):
    bs = bound_states(well["V"])
    assert np.all(bs.residuals <= 1e-8)
    x = well["V"].x
    u = bs.functions[0]
    E = bs.energies[0]
    outside = np.abs(x) > 1.5
    envelope = np.exp(-np.sqrt(abs(E)) * np.abs(x[outside]) / 2)
    c = 10 * np.abs(u).max()
    assert np.all(np.abs(u[outside]) <= c * envelope)


def test_completeness_identity(well, well_calc):
    V = well["V"]
    x = V.x
    f = np.exp(-x * x)
    out, rep = apply_multiplier(multiplier("identity"), V, f, (-8, 7), calc=well_calc)
    assert rep["window_completeness_defect"] <= 1e-3
    assert rep["pp_count"] == 1


def test_heat_multiplier_vs_crank_nicolson(well, well_calc):
    V = well["V"]
    x = V.x
    f = np.exp(-x * x)
    t = 0.5
    out, _ = apply_multiplier(multiplier("heat", t=t), V, f, (-8, 7), calc=well_calc)
    oracle = crank_nicolson_heat(V.samples, V.grid.dx, f, t, dt=2.5e-4)
    err = np.sqrt(trapz(np.abs(out.real - oracle) ** 2, V.grid.dx))
    assert err <= 1e-3


def test_imaginary_power_isometry_on_ac(well, well_calc):
    """|H|^{i gamma} preserves the L2 norm of the ac part to window tolerance."""
    V = well["V"]
    x = V.x
    f = np.exp(-(x - 0.5) ** 2)
    mu = multiplier("imaginary_power", gamma=1.0)
    out_mu, _ = apply_multiplier(mu, V, f, (-8, 7), calc=well_calc,
                                 include_pp=False)
    out_ac, _ = apply_multiplier(multiplier("identity"), V, f, (-8, 7),
                                 calc=well_calc, include_pp=False)
    n_mu = np.sqrt(trapz(np.abs(out_mu) ** 2, V.grid.dx))
    n_ac = np.sqrt(trapz(np.abs(out_ac) ** 2, V.grid.dx))
    assert abs(n_mu - n_ac) / n_ac <= 1e-3


def test_blocks_commute(well, well_calc):
    V = well["V"]
    x = V.x
    sysd = well_calc.system
    f = np.exp(-x * x) * np.cos(2 * x)
    a = well_calc.apply_window(sysd.window_phi_j(1),
                               well_calc.apply_window(sysd.window_phi_j(2), f, x), x)
    b = well_calc.apply_window(sysd.window_phi_j(2),
                               well_calc.apply_window(sysd.window_phi_j(1), f, x), x)
    assert np.abs(a - b).max() <= 1e-6


def test_multiplier_domain_error(well, well_calc):
    V = well["V"]
    f = np.exp(-V.x ** 2)
    bad = lambda xi: 1.0 / np.asarray(xi)        # singular at the bound state? no: at 0
    with pytest.raises(ValueError):
        apply_multiplier(lambda xi: np.full(np.shape(xi), np.inf), V, f, (-4, 4),
                         calc=well_calc)


def test_hoermander_norm_identity_scaling():
    res = hoermander_norm(multiplier("identity"), s=1.0)
    assert res["per_t"].max() / res["per_t"].min() <= 1.0 + 1e-9
    xi = np.linspace(1e-4, 8, 2 ** 14)
    chi_norm = sobolev_norm(chi_default(xi), xi[1] - xi[0], 1.0)
    assert abs(res["norm"] - chi_norm) / chi_norm <= 1e-2


def test_hoermander_norm_imaginary_power_invariance():
    res = hoermander_norm(multiplier("imaginary_power", gamma=1.0), s=1.0)
    assert res["per_t"].max() / res["per_t"].min() <= 1.0 + 1e-6


def test_sup_norm_sobolev_embedding_spot_check():
    # ||mu||_inf <= c ||mu||_{W^s_2,sloc} at s = 1: ratio finite on test multipliers
    for tag, params in [("identity", {}), ("imaginary_power", {"gamma": 3.0}),
                        ("heat", {"t": 0.25})]:
        mu = multiplier(tag, **params)
        norm = hoermander_norm(mu, s=1.0)["norm"]
        xi = np.geomspace(0.01, 100, 301)
        sup = np.abs(np.asarray(mu(xi))).max()
        assert sup <= 10.0 * norm
        assert np.isfinite(sup / norm)


def test_hoermander_needs_s_above_half():
    with pytest.raises(ValueError):
        hoermander_norm(multiplier("identity"), s=0.4)
