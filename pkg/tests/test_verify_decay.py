import numpy as np
import pytest

from jostkit.speccalc import SpectralCalculator, make_dyadic
from jostkit.verify import check_pointwise_decay
from jostkit.verify.decay import free_decay_check


def test_free_decay_uniform():
    rep = free_decay_check(make_dyadic(-10, 10), range(-6, 7), N=4)
    assert rep.passed
    assert rep.sup_ratio <= 1.05


def test_well_decay_uniformity(well):
    calc = SpectralCalculator(well["V"])
    rep = check_pointwise_decay(well["V"], range(-6, 8), calc=calc)
    assert rep.passed, [r["c_j"] for r in rep.rows]
    assert rep.extras["j0"] >= 2
    regimes = {r["regime"] for r in rep.rows}
    assert regimes == {"low", "high"}


def test_eps_sensitivity(well):
    """Smaller eps weakens the surrogate tail; the check must still pass."""
    calc = SpectralCalculator(well["V"])
    for eps in (0.25, 0.5, 1.0):
        rep = check_pointwise_decay(well["V"], range(2, 8), eps=eps, calc=calc)
        assert rep.passed, eps
