import numpy as np
import pytest

from jostkit import UniformGrid, reference_potential
from jostkit.quadrature import trapz
from jostkit.speccalc import SpectralCalculator, multiplier
from jostkit.verify import spike_train_family, weak11_experiment


def test_chebyshev_exact_on_grid():
    """alpha |{|f| > alpha}| <= ||f||_1, exact grid counting."""
    rng = np.random.default_rng(11)
    dx = 0.01
    f = np.abs(rng.standard_normal(2000))
    l1 = trapz(f, dx)
    for alpha in (0.1, 0.5, 1.0, 2.0):
        measure = np.count_nonzero(f > alpha) * dx
        assert alpha * measure <= l1 + 1e-12


def test_family_normalized():
    x = np.arange(-8, 8.001, 0.02)
    fam = spike_train_family(x, n_members=6, width=0.25, seed=3)
    for f in fam:
        assert abs(trapz(np.abs(f), 0.02) - 1.0) < 1e-9


def test_free_imaginary_power_finite_and_stable():
    g = UniformGrid.symmetric(10.0, 0.02)
    V0 = reference_potential("free", {}, g)
    calc = SpectralCalculator(V0)
    mu = multiplier("imaginary_power", gamma=1.0)
    alphas = np.geomspace(1e-3, 30.0, 31)
    sups = []
    for width in (0.4, 0.1):           # spikes sharpen 4x
        fam = spike_train_family(V0.x, n_members=6, width=width, seed=9)
        rep = weak11_experiment(mu, V0, fam, alphas, (-6, 8), calc=calc)
        assert rep.passed
        sups.append(rep.sup_ratio)
    assert np.isfinite(sups).all()
    assert sups[1] <= 3.0 * sups[0] + 1e-12   # no blow-up under sharpening


def test_well_weak11_finite(well):
    calc = SpectralCalculator(well["V"])
    mu = multiplier("imaginary_power", gamma=1.0)
    fam = spike_train_family(well["V"].x, n_members=4, width=0.3, seed=5)
    alphas = np.geomspace(1e-3, 30.0, 25)
    rep = weak11_experiment(mu, well["V"], fam, alphas, (-6, 8), calc=calc)
    assert rep.passed and np.isfinite(rep.sup_ratio)
