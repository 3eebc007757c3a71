"""Spatially discrete array baseline.

The aperture is replaced by a lattice of point elements with spacing ``d``,
each with effective area ``|S|``.  The discrete channel of user ``k`` is
``hhat_k = sqrt(|S|) [h_k(r_1), ..., h_k(r_M)]`` and the discrete correlation
matrix ``Rhat = Hhat^H Hhat`` plays the role of ``R`` in every formula of
:mod:`capa.beamforming` and :mod:`capa.metrics`.
"""

import math
from dataclasses import dataclass

import numpy as np

from .beamforming import weight_matrix
from .exceptions import ConfigError
from .geometry import channel_samples
from .metrics import sinr_report
from .quadrature import gram

__all__ = ["SpdaArray", "SpdaChannel", "discretize", "half_wavelength_array", "spda_channels", "spda_weights"]


@dataclass(frozen=True)
class SpdaArray:
    """Element centres, spacing and per-element effective area."""

    spacing: float
    element_area: float
    centers: np.ndarray

    @property
    def M(self):
        return self.centers.shape[0]


@dataclass(frozen=True)
class SpdaChannel:
    """Discrete channel matrix ``Hhat`` (M x K) and ``Rhat = Hhat^H Hhat``."""

    Hhat: np.ndarray
    Rhat: np.ndarray

    @property
    def K(self):
        return self.Hhat.shape[1]


def _count(L, d):
    return max(1, math.ceil(L / d))


def discretize(aperture, d, element_area):
    """Lattice ``((m_x - 1) d - Lx/2, (m_y - 1) d - Ly/2, 0)``.

    ``M = ceil(Lx/d) * ceil(Ly/d)``.  The lattice starts at the aperture
    corner and is not re-centred.
    """
    if not d > 0:
        raise ConfigError(f"element spacing must be positive, got {d}")
    if not element_area > 0:
        raise ConfigError(f"element area must be positive, got {element_area}")
    mx = np.arange(_count(aperture.Lx, d)) * d - aperture.Lx / 2.0
    my = np.arange(_count(aperture.Ly, d)) * d - aperture.Ly / 2.0
    X, Y = np.meshgrid(mx, my, indexing="ij")
    centers = np.column_stack([X.ravel(), Y.ravel(), np.zeros(X.size)])
    centers.setflags(write=False)
    return SpdaArray(float(d), float(element_area), centers)


def half_wavelength_array(aperture, wave):
    """Default array: spacing ``lambda/2``, isotropic element area ``lambda^2/(4 pi)``."""
    return discretize(aperture, wave.wavelength / 2.0, wave.isotropic_area)


def spda_channels(layout, wave, array):
    """Sample the users' channels at the element centres."""
    H = channel_samples(array.centers, layout, wave) * np.sqrt(array.element_area)
    return SpdaChannel(H.T, gram(H, np.ones(array.M)))


def spda_weights(scheme, channel, powers):
    """Weight matrix and SINR report of a scheme on the discrete array.

    The beamformer matrix is ``W = Hhat A`` with ``A`` from the same
    construction used for the continuous aperture.

    Returns
    -------
    weights : WeightMatrix
    W : ndarray, shape (M, K)
    report : SinrReport
    """
    wm = weight_matrix(scheme, channel.Rhat, powers)
    return wm, channel.Hhat @ wm.A, sinr_report(scheme, channel.Rhat, powers)
