"""Receive aperture, user placement and free-space line-of-sight channels.

All positions are in meters.  The receive aperture is a rectangle in the
x-y plane centred at the origin; users sit above it (positive z).
"""

from dataclasses import dataclass

import numpy as np

from .exceptions import ConfigError, SingularityError

SPEED_OF_LIGHT = 299_792_458.0
FREE_SPACE_IMPEDANCE = 120.0 * np.pi

__all__ = [
    "SPEED_OF_LIGHT",
    "FREE_SPACE_IMPEDANCE",
    "Aperture",
    "WaveParams",
    "UserRegion",
    "UserLayout",
    "spatial_response",
    "effective_channel",
    "channel_samples",
    "sample_user_positions",
]


@dataclass(frozen=True)
class Aperture:
    """Planar rectangular receive aperture of size ``Lx`` by ``Ly``."""

    Lx: float
    Ly: float

    def __post_init__(self):
        if not (self.Lx > 0 and self.Ly > 0):
            raise ConfigError(f"aperture sides must be positive, got {self.Lx}, {self.Ly}")

    @property
    def area(self):
        return self.Lx * self.Ly

    @classmethod
    def square(cls, area):
        side = float(np.sqrt(area))
        return cls(side, side)


@dataclass(frozen=True)
class WaveParams:
    """Carrier frequency and propagation constants."""

    frequency: float = 2.4e9
    speed_of_light: float = SPEED_OF_LIGHT
    impedance: float = FREE_SPACE_IMPEDANCE

    def __post_init__(self):
        for name in ("frequency", "speed_of_light", "impedance"):
            if not getattr(self, name) > 0:
                raise ConfigError(f"{name} must be positive")

    @property
    def wavelength(self):
        return self.speed_of_light / self.frequency

    @property
    def wavenumber(self):
        return 2.0 * np.pi / self.wavelength

    @property
    def isotropic_area(self):
        """Effective area of an isotropic antenna, lambda^2 / (4 pi)."""
        return self.wavelength**2 / (4.0 * np.pi)


@dataclass(frozen=True)
class UserRegion:
    """Box ``|x| <= Ux, |y| <= Uy, Uz_min <= z <= Uz_max`` holding the users."""

    Ux: float = 5.0
    Uy: float = 5.0
    Uz_min: float = 15.0
    Uz_max: float = 30.0

    def __post_init__(self):
        if not (self.Ux > 0 and self.Uy > 0):
            raise ConfigError("region half-widths Ux, Uy must be positive")
        if not self.Uz_min > 0:
            raise ConfigError("region Uz_min must be positive")
        if self.Uz_min > self.Uz_max:
            raise ConfigError(f"region Uz_min={self.Uz_min} exceeds Uz_max={self.Uz_max}")


@dataclass(frozen=True)
class UserLayout:
    """Positions, effective apertures and transmit powers of K users.

    Parameters
    ----------
    positions : array_like, shape (K, 3)
        Centre point of each user aperture.
    aperture_areas : array_like, shape (K,)
        Effective aperture area of each user in m^2.
    powers : array_like, shape (K,)
        Transmit powers.
    noise_variance : float
        Noise field intensity.  Only ``powers / noise_variance`` enters the
        SINR expressions.
    """

    positions: np.ndarray
    aperture_areas: np.ndarray
    powers: np.ndarray
    noise_variance: float

    def __post_init__(self):
        pos = np.array(self.positions, dtype=float, ndmin=2)
        K = pos.shape[0]
        if pos.shape != (K, 3) or K < 1:
            raise ConfigError(f"positions must have shape (K, 3), got {pos.shape}")
        areas = np.broadcast_to(np.asarray(self.aperture_areas, dtype=float), (K,)).copy()
        powers = np.broadcast_to(np.asarray(self.powers, dtype=float), (K,)).copy()
        if np.any(areas <= 0):
            raise ConfigError("user aperture areas must be positive")
        if np.any(powers <= 0):
            raise ConfigError("user powers must be positive")
        if not self.noise_variance > 0:
            raise ConfigError("noise variance must be positive")
        if K > 1 and len(np.unique(pos, axis=0)) < K:
            raise ConfigError("user positions must be distinct")
        for arr in (pos, areas, powers):
            arr.setflags(write=False)
        object.__setattr__(self, "positions", pos)
        object.__setattr__(self, "aperture_areas", areas)
        object.__setattr__(self, "powers", powers)
        object.__setattr__(self, "noise_variance", float(self.noise_variance))

    @property
    def K(self):
        return self.positions.shape[0]

    @property
    def snr_ratios(self):
        """Per-user ``P_k / sigma^2``."""
        return self.powers / self.noise_variance

    @classmethod
    def isotropic(cls, positions, wave, power, noise_variance):
        """Layout where every user has an isotropic-antenna aperture."""
        positions = np.array(positions, dtype=float, ndmin=2)
        return cls(positions, wave.isotropic_area, power, noise_variance)


def _distance(r, s):
    d = np.linalg.norm(np.asarray(r, dtype=float) - np.asarray(s, dtype=float), axis=-1)
    if np.any(d == 0):
        raise SingularityError("observation point coincides with source point")
    return d


def spatial_response(r, s, wave):
    """Free-space scalar Green's function between source ``s`` and point ``r``.

    .. math:: g(r, s) = \\frac{-j k_0 \\eta}{4\\pi\\|r-s\\|} e^{-j k_0 \\|r-s\\|}

    Broadcasts over leading dimensions of ``r`` and ``s``.
    """
    d = _distance(r, s)
    k0 = wave.wavenumber
    return -1j * k0 * wave.impedance / (4.0 * np.pi * d) * np.exp(-1j * k0 * d)


def effective_channel(r, k, layout, wave):
    """Effective channel of user ``k`` at aperture point(s) ``r``."""
    if not 0 <= k < layout.K:
        raise IndexError(f"user index {k} out of range for K={layout.K}")
    return spatial_response(r, layout.positions[k], wave) * np.sqrt(layout.aperture_areas[k])


def channel_samples(points, layout, wave):
    """Sample every user's effective channel on a set of points.

    Returns
    -------
    ndarray, shape (K, N)
        Row ``k`` holds ``h_k`` evaluated at each of the ``N`` points.
    """
    points = np.asarray(points, dtype=float)
    g = spatial_response(points[None, :, :], layout.positions[:, None, :], wave)
    return g * np.sqrt(layout.aperture_areas)[:, None]


def sample_user_positions(seed, trial_index, K, region):
    """Draw ``K`` user positions uniformly inside ``region``.

    The draw is a pure function of ``(seed, trial_index, K, region)``.  Users
    are drawn one after another from the same stream, so the first ``K``
    users of a larger draw coincide with a draw of ``K`` users.
    """
    if K < 1:
        raise ConfigError(f"number of users must be >= 1, got {K}")
    if region.Uz_min > region.Uz_max:
        raise ConfigError("degenerate user region: Uz_min > Uz_max")
    rng = np.random.default_rng([int(seed), int(trial_index)])
    u = rng.random((K, 3))
    lo = np.array([-region.Ux, -region.Uy, region.Uz_min])
    hi = np.array([region.Ux, region.Uy, region.Uz_max])
    return lo + (hi - lo) * u
