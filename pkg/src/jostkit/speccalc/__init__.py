from .dyadic import DyadicSystem, make_dyadic, BandWindow
from .kernels import OperatorKernel, ResolutionError, assemble_kernel, assemble_kernel_reflected, band_k_grid
from .multipliers import multiplier
from .spectral import BoundStateSet, SpectralCalculator, apply_multiplier, bound_states
from .hnorm import hoermander_norm, sobolev_norm

__all__ = [
    "DyadicSystem", "make_dyadic", "BandWindow",
    "OperatorKernel", "ResolutionError", "assemble_kernel",
    "assemble_kernel_reflected", "band_k_grid",
    "multiplier", "BoundStateSet", "SpectralCalculator", "apply_multiplier",
    "bound_states", "hoermander_norm", "sobolev_norm",
]
