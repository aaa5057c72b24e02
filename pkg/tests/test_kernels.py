import numpy as np
import pytest

from jostkit import reference_potential, scattering_coefficients, solve_jost, UniformGrid
from jostkit.speccalc import (ResolutionError, assemble_kernel,
                              assemble_kernel_reflected, band_k_grid, make_dyadic)

from .oracles import fft_free_kernel_on_differences

SYS = make_dyadic(-10, 10)


def _band_solution(V, win, x, y):
    lam = band_k_grid(win, x, y)
    jost = solve_jost(V, lam)
    return jost, scattering_coefficients(V, jost)


def test_free_kernel_matches_fft_oracle():
    g = UniformGrid.symmetric(8.0, 0.05)
    V0 = reference_potential("free", {}, g)
    x = g.points()
    for j in (-2, 0, 2):
        win = SYS.window_Phi_j(j)
        jost, scat = _band_solution(V0, win, x, x)
        K = assemble_kernel(win, j, scat, jost, x, x)
        oracle = fft_free_kernel_on_differences(win, x)
        assert np.abs(K.values - oracle).max() <= 1e-8


def test_symmetry_and_realness(well):
    V = well["V"]
    x = np.arange(-8.0, 8.001, 0.1)
    win = SYS.window_phi_j(0)
    jost, scat = _band_solution(V, win, x, x)
    K = assemble_kernel(win, 0, scat, jost, x, x)
    assert K.symmetry_residual() <= 1e-6
    assert not np.iscomplexobj(K.values)


def test_cross_assembly_same_side(well):
    V = well["V"]
    win = SYS.window_phi_j(0)
    xpos = np.arange(0.5, 8.001, 0.1)
    xneg = -xpos[::-1]
    jost, scat = _band_solution(V, win, xpos, xpos)
    Kd = assemble_kernel(win, 0, scat, jost, xpos, xpos)
    Kr = assemble_kernel_reflected(win, 0, scat, jost, xpos, xpos, side=+1)
    assert np.abs(Kd.values - Kr.values).max() <= 1e-6
    Kd2 = assemble_kernel(win, 0, scat, jost, xneg, xneg)
    Kr2 = assemble_kernel_reflected(win, 0, scat, jost, xneg, xneg, side=-1)
    assert np.abs(Kd2.values - Kr2.values).max() <= 1e-6


def test_nyquist_refusal():
    g = UniformGrid.symmetric(8.0, 0.05)
    V0 = reference_potential("free", {}, g)
    x = g.points()
    win = SYS.window_phi_j(4)
    lam = np.linspace(np.sqrt(win.band[0]), np.sqrt(win.band[1]), 10)  # far too coarse
    jost = solve_jost(V0, lam)
    scat = scattering_coefficients(V0, jost)
    with pytest.raises(ResolutionError) as exc:
        assemble_kernel(win, 4, scat, jost, x, x)
    assert exc.value.required_dk is not None and exc.value.required_dk > 0


def test_empty_window_gives_exact_zero(well):
    win = SYS.window_tail(1, 4)       # j <= j_I - 1
    x = np.arange(-4.0, 4.001, 0.5)
    jost, scat = well["jost"], well["scat"]
    K = assemble_kernel(win, 1, scat, jost, x, x)
    assert np.abs(K.values).max() == 0.0


def test_complex_window_kernel_not_real(well):
    from jostkit.speccalc import multiplier

    V = well["V"]
    mu = multiplier("imaginary_power", gamma=1.0)
    win = SYS.window_phi_j(2).times(mu)
    x = np.arange(-4.0, 4.001, 0.2)
    jost, scat = _band_solution(V, win, x, x)
    K = assemble_kernel(win, 2, scat, jost, x, x)
    assert np.iscomplexobj(K.values)
    assert np.abs(K.values.imag).max() > 1e-6
