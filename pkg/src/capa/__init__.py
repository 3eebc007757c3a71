"""Linear receive beamforming for continuous aperture arrays.

Closed-form MRC, ZF and MMSE beamformers for a continuous receive aperture,
a half-wavelength discrete-array baseline, and numerical checks of the
operator identities the closed forms rest on.
"""

from .beamforming import (
    SCHEMES,
    PowerProfile,
    WeightMatrix,
    mmse_weights,
    mrc_weights,
    reduced_mmse_coefficients,
    reduced_zf_coefficients,
    scalar_filter,
    weight_matrix,
    zf_weights,
)
from .exceptions import AssumptionViolation, CapaError, ConfigError, RankDeficiencyError, SingularityError
from .geometry import Aperture, UserLayout, UserRegion, WaveParams
from .metrics import SinrReport, sinr, sinr_generic, sinr_report
from .quadrature import correlation_matrix, sample_channels, tensor_grid
from .scenario import Scenario

__version__ = "0.1.0"
