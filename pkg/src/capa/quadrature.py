"""Gauss-Legendre quadrature on the aperture and the channel correlation matrix.

Every aperture integral in the package reduces to a weighted sum over the
nodes of a tensor-product Gauss-Legendre rule::

    int_A u*(r) v(r) dr  ~=  sum_n w_n conj(u_n) v_n
"""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .exceptions import AssumptionViolation
from .geometry import channel_samples

__all__ = [
    "legendre_rule",
    "QuadratureGrid",
    "tensor_grid",
    "inner_product",
    "ChannelMatrix",
    "sample_channels",
    "correlation_matrix",
    "channel_gains",
    "correlation_coefficient",
]

_NEWTON_TOL = 1e-15
_NEWTON_MAXITER = 100


def _tabulated(n):
    s = np.sqrt
    if n == 1:
        return [0.0], [2.0]
    if n == 2:
        return [-1 / s(3), 1 / s(3)], [1.0, 1.0]
    if n == 3:
        return [-s(3 / 5), 0.0, s(3 / 5)], [5 / 9, 8 / 9, 5 / 9]
    if n == 4:
        a, b = s(3 / 7 - 2 / 7 * s(6 / 5)), s(3 / 7 + 2 / 7 * s(6 / 5))
        wa, wb = (18 + s(30)) / 36, (18 - s(30)) / 36
        return [-b, -a, a, b], [wb, wa, wa, wb]
    a, b = s(5 - 2 * s(10 / 7)) / 3, s(5 + 2 * s(10 / 7)) / 3
    wa, wb = (322 + 13 * s(70)) / 900, (322 - 13 * s(70)) / 900
    return [-b, -a, 0.0, a, b], [wb, wa, 128 / 225, wa, wb]


def _legendre_and_derivative(n, x):
    p_prev = np.ones_like(x)
    p = x.copy()
    for j in range(2, n + 1):
        p_prev, p = p, ((2 * j - 1) * x * p - (j - 1) * p_prev) / j
    dp = n * (x * p - p_prev) / (x * x - 1.0)
    return p, dp


def _newton_rule(n):
    m = (n + 1) // 2
    i = np.arange(1, m + 1)
    x = np.cos(np.pi * (i - 0.25) / (n + 0.5))
    for _ in range(_NEWTON_MAXITER):
        p, dp = _legendre_and_derivative(n, x)
        dx = p / dp
        x = x - dx
        if np.max(np.abs(dx)) < _NEWTON_TOL:
            break
    _, dp = _legendre_and_derivative(n, x)
    w = 2.0 / ((1.0 - x * x) * dp * dp)
    # x is descending and positive; mirror to get the full ascending rule
    nodes = np.concatenate([-x, x[::-1][n % 2:]])
    weights = np.concatenate([w, w[::-1][n % 2:]])
    if n % 2:
        nodes[m - 1] = 0.0
    return nodes, weights


@lru_cache(maxsize=64)
def _cached_rule(n):
    if n <= 5:
        nodes, weights = (np.array(v, dtype=float) for v in _tabulated(n))
    else:
        nodes, weights = _newton_rule(n)
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return nodes, weights


def legendre_rule(n):
    """Gauss-Legendre nodes and weights on ``[-1, 1]``.

    Parameters
    ----------
    n : int
        Number of nodes, ``n >= 1``.  The rule integrates polynomials of
        degree up to ``2n - 1`` exactly.

    Returns
    -------
    nodes, weights : ndarray, shape (n,)
        Ascending nodes and the matching positive weights (read-only).
    """
    n = int(n)
    if n < 1:
        raise ValueError(f"quadrature order must be >= 1, got {n}")
    return _cached_rule(n)


@dataclass(frozen=True)
class QuadratureGrid:
    """Product quadrature rule on the aperture.

    ``nodes`` has shape (N, 3) with z = 0, ``weights`` shape (N,) in m^2.
    """

    nodes: np.ndarray
    weights: np.ndarray
    order_x: int
    order_y: int

    @property
    def N(self):
        return self.weights.shape[0]


def tensor_grid(aperture, order_x, order_y=None):
    """Tensor-product Gauss-Legendre grid over a rectangular aperture."""
    order_y = order_x if order_y is None else order_y
    tx, wx = legendre_rule(order_x)
    ty, wy = legendre_rule(order_y)
    hx, hy = aperture.Lx / 2.0, aperture.Ly / 2.0
    X, Y = np.meshgrid(hx * tx, hy * ty, indexing="ij")
    nodes = np.column_stack([X.ravel(), Y.ravel(), np.zeros(X.size)])
    weights = np.outer(wx, wy).ravel() * (hx * hy)
    return QuadratureGrid(nodes, weights, int(order_x), int(order_y))


def inner_product(u, v, grid):
    """Quadrature approximation of ``int_A conj(u(r)) v(r) dr``."""
    u = np.asarray(u)
    v = np.asarray(v)
    if u.shape[-1] != grid.N or v.shape[-1] != grid.N:
        raise ValueError(
            f"sample length mismatch: got {u.shape[-1]} and {v.shape[-1]}, grid has {grid.N}"
        )
    return np.sum(grid.weights * np.conj(u) * v, axis=-1)


@dataclass(frozen=True)
class ChannelMatrix:
    """Channel samples ``H[k, n] = h_k(r_n)`` on a quadrature grid."""

    H: np.ndarray
    grid: QuadratureGrid

    @property
    def K(self):
        return self.H.shape[0]


def sample_channels(layout, wave, grid):
    """Evaluate every user's effective channel at the grid nodes."""
    return ChannelMatrix(channel_samples(grid.nodes, layout, wave), grid)


def gram(H, weights):
    """Weighted Gram matrix ``G[i, j] = sum_n w_n conj(H[i, n]) H[j, n]``.

    The result is symmetrised so that it is exactly Hermitian.
    """
    H = np.asarray(H)
    if not np.all(np.isfinite(H)):
        raise ValueError("non-finite channel samples")
    G = (np.conj(H) * weights) @ H.T
    return 0.5 * (G + G.conj().T)


def correlation_matrix(channels):
    """Channel correlation matrix ``R[k1, k2] = int_A conj(h_k1) h_k2``.

    Parameters
    ----------
    channels : ChannelMatrix

    Returns
    -------
    ndarray, shape (K, K)
        Hermitian positive semidefinite matrix; its diagonal holds the
        channel gains.
    """
    return gram(channels.H, channels.grid.weights)


def channel_gains(R):
    """Channel gains ``a_k`` (real diagonal of ``R``)."""
    return np.real(np.diagonal(R)).copy()


def correlation_coefficient(R, k1, k2):
    """Squared correlation coefficient ``|R[k1,k2]|^2 / (a_k1 a_k2)``.

    Values of 1 (within rounding) for ``k1 != k2`` mean the two channels
    are parallel, which the beamformers in this package cannot handle.
    """
    a1 = np.real(R[k1, k1])
    a2 = np.real(R[k2, k2])
    if a1 <= 0 or a2 <= 0:
        raise AssumptionViolation("zero channel gain, correlation coefficient undefined")
    if k1 == k2:
        return 1.0
    return float(np.abs(R[k1, k2]) ** 2 / (a1 * a2))
