from .report import EstimateReport
from .weighted_l2 import check_weighted_L2, window_profile_h1_bump
from .decay import check_pointwise_decay
from .cz import CZDecomposition, CZCube, cz_decompose, hl_maximal
from .weak11 import weak11_experiment, spike_train_family
from .besov import besov_norm, tl_norm, spectrally_localized_vector
from .tails import check_kernel_tail_L1

__all__ = [
    "EstimateReport", "check_weighted_L2", "window_profile_h1_bump",
    "check_pointwise_decay", "CZDecomposition", "CZCube", "cz_decompose",
    "hl_maximal", "weak11_experiment", "spike_train_family",
    "besov_norm", "tl_norm", "spectrally_localized_vector",
    "check_kernel_tail_L1",
]
