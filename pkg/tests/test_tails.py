import numpy as np
import pytest

from jostkit import UniformGrid, reference_potential
from jostkit.speccalc import SpectralCalculator, multiplier
from jostkit.verify import check_kernel_tail_L1


def test_vanishing_below_cutoff_exact():
    g = UniformGrid.symmetric(8.0, 0.05)
    V0 = reference_potential("free", {}, g)
    calc = SpectralCalculator(V0)
    mu = multiplier("imaginary_power", gamma=1.0)
    j_I = 2
    t = 2.0 ** (-j_I / 2.0)
    rep = check_kernel_tail_L1(mu, V0, (0.0, t), j_I, range(j_I - 3, j_I), calc=calc)
    assert all(r["exact_zero"] for r in rep.rows)
    assert all(r["tail"] == 0.0 for r in rep.rows)


def test_free_tail_slope_s1():
    g = UniformGrid.symmetric(8.0, 0.05)
    V0 = reference_potential("free", {}, g)
    calc = SpectralCalculator(V0)
    mu = multiplier("imaginary_power", gamma=1.0)
    j_I = 0
    t = 1.0
    rep = check_kernel_tail_L1(mu, V0, (0.0, t), j_I, range(j_I, j_I + 7),
                               s=1.0, calc=calc)
    assert rep.slope is not None
    assert abs(rep.slope - 0.25) <= 0.1         # (2^{j/2} t)^{-1/2} decay
    assert rep.passed
    assert np.isfinite(rep.sup_ratio)
    print("j-sum / Hoermander norm:", rep.sup_ratio)


def test_interval_length_validated(well):
    mu = multiplier("identity")
    with pytest.raises(ValueError):
        check_kernel_tail_L1(mu, well["V"], (0.0, 0.9), 0, range(0, 3))
