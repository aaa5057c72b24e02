"""jostkit: the 1D Schrodinger scattering calculus, numerically.

Jost functions by Volterra iteration, transmission/reflection coefficients,
Marchenko kernels, spectral-multiplier kernels phi(H)(x,y), and a harness that
checks the weighted-L2, pointwise-decay, Born-series, weak-(1,1) and
Besov/Triebel-Lizorkin estimates of the underlying theory at desk scale.
"""

__version__ = "0.1.0"

from .grids import UniformGrid
from .potential import Potential, WeightedNorms, reference_potential, weighted_norm
from .jost import JostField, green_factor, green_factor_dk, jost_derivative, solve_jost, volterra_terms
from .scattering import (BornSeriesData, ScatteringData, alpha, born_series_high,
                         classify_resonance, interrelation_residual, j0_index,
                         k0_threshold, scattering_asymptotics_report,
                         scattering_coefficients)
from .marchenko import (MarchenkoKernel, SampledDensity, alpha_from_densities,
                        density_a, density_b, m_plus_from_B, nu_from_kernel,
                        solve_marchenko, t_inverse_resonant_form, weighted_B_bounds)

__all__ = [
    "UniformGrid", "Potential", "WeightedNorms", "reference_potential",
    "weighted_norm", "JostField", "green_factor", "green_factor_dk",
    "jost_derivative", "solve_jost", "volterra_terms", "ScatteringData",
    "BornSeriesData", "alpha", "born_series_high", "classify_resonance",
    "interrelation_residual", "j0_index", "k0_threshold",
    "scattering_asymptotics_report", "scattering_coefficients",
    "MarchenkoKernel", "SampledDensity", "alpha_from_densities", "density_a",
    "density_b", "m_plus_from_B", "nu_from_kernel", "solve_marchenko",
    "t_inverse_resonant_form", "weighted_B_bounds",
]
