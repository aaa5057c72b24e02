import numpy as np
import pytest

from jostkit import (UniformGrid, reference_potential, scattering_coefficients,
                     solve_jost, solve_marchenko)

K_GRID = np.concatenate([[0.0], np.arange(0.05, 8.0001, 0.05)])


@pytest.fixture(scope="session")
def well():
    """Square well depth -1 width 2 on [-10, 10] at dx = 0.01, fully solved."""
    g = UniformGrid.symmetric(10.0, 0.01)
    V = reference_potential("square_well", {"depth": -1.0, "width": 2.0}, g)
    jost = solve_jost(V, K_GRID, derivatives=True)
    scat = scattering_coefficients(V, jost)
    mk = solve_marchenko(V)
    return {"V": V, "jost": jost, "scat": scat, "mk": mk, "k": K_GRID}


@pytest.fixture(scope="session")
def sech2():
    """Reflectionless -2 sech^2 on [-16, 16] at dx = 0.01 (Marchenko at 0.02)."""
    g = UniformGrid.symmetric(16.0, 0.01)
    V = reference_potential("sech2", {"amplitude": -2.0, "scale": 1.0}, g)
    jost = solve_jost(V, K_GRID, derivatives=True)
    scat = scattering_coefficients(V, jost)
    g2 = UniformGrid.symmetric(16.0, 0.02)
    V2 = reference_potential("sech2", {"amplitude": -2.0, "scale": 1.0}, g2)
    mk = solve_marchenko(V2)
    return {"V": V, "jost": jost, "scat": scat, "mk": mk, "V2": V2, "k": K_GRID}


@pytest.fixture(scope="session")
def free8():
    g = UniformGrid.symmetric(8.0, 0.05)
    V = reference_potential("free", {}, g)
    jost = solve_jost(V, K_GRID)
    scat = scattering_coefficients(V, jost)
    return {"V": V, "jost": jost, "scat": scat, "k": K_GRID}


@pytest.fixture(scope="session")
def resonant_well():
    """Square well with depth tuned until nu = 0 (zero-energy resonance)."""
    from scipy.optimize import brentq

    from jostkit.scattering import _weighted_V_integral

    g = UniformGrid.symmetric(10.0, 0.01)

    def nu_of_depth(d):
        Vd = reference_potential("square_well", {"depth": d, "width": 2.0}, g)
        fd = solve_jost(Vd, np.array([0.0]))
        return float(_weighted_V_integral(Vd, fd.m_plus, fd.mp_plus, 0.0,
                                          fd.k_grid)[0].real)

    depth = brentq(nu_of_depth, -3.0, -2.0, xtol=1e-13)
    V = reference_potential("square_well", {"depth": depth, "width": 2.0}, g)
    k = np.concatenate([[0.0], np.arange(0.05, 4.0001, 0.05)])
    jost = solve_jost(V, k)
    scat = scattering_coefficients(V, jost)
    mk = solve_marchenko(V)
    return {"V": V, "jost": jost, "scat": scat, "mk": mk, "k": k, "depth": depth}
