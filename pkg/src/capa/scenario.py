"""Default simulation scenario and per-trial channel realisations."""

from dataclasses import dataclass, field

import numpy as np

from .beamforming import PowerProfile
from .geometry import Aperture, UserLayout, UserRegion, WaveParams, sample_user_positions
from .quadrature import correlation_matrix, sample_channels, tensor_grid
from .spda import half_wavelength_array, spda_channels

__all__ = ["DEFAULT_POWER", "DEFAULT_NOISE_VARIANCE", "Scenario", "Realization"]

DEFAULT_POWER = 40e-3
DEFAULT_NOISE_VARIANCE = 5.6e-3


@dataclass(frozen=True)
class Realization:
    """One random user drop: layout, sampled channels and correlation matrices."""

    layout: UserLayout
    channels: object
    R: np.ndarray
    profile: PowerProfile
    spda: object = None


@dataclass(frozen=True)
class Scenario:
    """Physical setup shared by all trials of an experiment.

    Defaults: 0.5 m x 0.5 m aperture at 2.4 GHz, eight isotropic users in a
    10 m x 10 m x 15 m box starting 15 m above the aperture, ``P = 0.04``,
    ``sigma^2 = 5.6e-3`` and a 30 x 30 quadrature grid.
    """

    aperture: Aperture = field(default_factory=lambda: Aperture(0.5, 0.5))
    wave: WaveParams = field(default_factory=WaveParams)
    region: UserRegion = field(default_factory=UserRegion)
    K: int = 8
    power: float = DEFAULT_POWER
    noise_variance: float = DEFAULT_NOISE_VARIANCE
    quad_order: int = 30

    def grid(self):
        return tensor_grid(self.aperture, self.quad_order, self.quad_order)

    def layout(self, seed, trial_index, K=None, power=None):
        K = self.K if K is None else K
        power = self.power if power is None else power
        positions = sample_user_positions(seed, trial_index, K, self.region)
        return UserLayout.isotropic(positions, self.wave, power, self.noise_variance)

    def realize(self, seed, trial_index, K=None, power=None, with_spda=False, grid=None):
        """Draw users for ``(seed, trial_index)`` and build their channels."""
        layout = self.layout(seed, trial_index, K, power)
        channels = sample_channels(layout, self.wave, self.grid() if grid is None else grid)
        spda = None
        if with_spda:
            spda = spda_channels(layout, self.wave, half_wavelength_array(self.aperture, self.wave))
        return Realization(
            layout, channels, correlation_matrix(channels), PowerProfile.from_layout(layout), spda
        )
