"""SINR, SNR-loss factors, rates and MSEs of the linear beamformers.

Every quantity is expressed in terms of the correlation matrix ``R`` and the
SNR ratios ``p_k = P_k / sigma^2``.  With ``a_k = R[k, k]`` each scheme's
SINR has the form ``gamma_k = p_k a_k (1 - alpha_k)`` where ``alpha_k`` is
the fraction of the single-user SNR lost to interference (MRC) or to its
suppression (ZF, MMSE).
"""

from dataclasses import dataclass

import numpy as np

from .beamforming import (
    SCHEMES,
    PowerProfile,
    WeightMatrix,
    hermitian_inverse,
    hermitian_solve,
    leave_one_out,
)
from .quadrature import inner_product

__all__ = [
    "sinr_of_coefficients",
    "sinr_generic",
    "sinr_quadrature",
    "sinr_mrc",
    "sinr_zf",
    "sinr_mmse",
    "sinr",
    "loss_factor",
    "rate_and_mse",
    "performance_bounds",
    "two_user_closed_forms",
    "mrc_zf_crossover",
    "SinrReport",
    "sinr_report",
]


def _ratios(powers):
    if isinstance(powers, PowerProfile):
        return powers.ratios
    return np.atleast_1d(np.asarray(powers, dtype=float))


def sinr_of_coefficients(c, R, powers, k):
    """SINR of user ``k`` for the beamformer ``w_k = sum_k' c[k'] h_k'``.

    Uses ``int w_k^* h_k' = (c^H R)_k'`` and ``int |w_k|^2 = c^H R c``.
    """
    R = np.asarray(R)
    p = _ratios(powers)
    c = np.asarray(c)
    g = np.conj(c) @ R
    norm2 = float(np.real(np.vdot(c, R @ c)))
    if not norm2 > 0:
        raise ValueError(f"beamformer for user {k} has zero norm")
    power = p * np.abs(g) ** 2
    interference = np.sum(power) - power[k]
    return float(power[k] / (interference + norm2))


def sinr_generic(weights, R, powers, k):
    """SINR of user ``k`` for an arbitrary weight matrix.

    With ``G = A^H R`` this is
    ``p_k |G_kk|^2 / (sum_{k' != k} p_k' |G_kk'|^2 + [A^H R A]_kk)``.
    """
    A = weights.A if isinstance(weights, WeightMatrix) else np.asarray(weights)
    return sinr_of_coefficients(A[:, k], R, powers, k)


def sinr_quadrature(weights, channels, powers, k):
    """SINR of user ``k`` from quadrature integrals of the sampled beamformer.

    Independent of ``R``: the beamformer is formed pointwise on the grid and
    each integral is evaluated by the quadrature rule directly.
    """
    A = weights.A if isinstance(weights, WeightMatrix) else np.asarray(weights)
    p = _ratios(powers)
    H, grid = channels.H, channels.grid
    w = A[:, k] @ H
    proj = inner_product(w[None, :], H, grid)
    norm2 = float(np.real(inner_product(w, w, grid)))
    power = p * np.abs(proj) ** 2
    return float(power[k] / (np.sum(np.delete(power, k)) + norm2))


def _mrc_interference(R, p, k):
    a_k, r, _ = leave_one_out(R, k)
    return a_k, float(np.sum(np.delete(p, k) * np.abs(r) ** 2))


def _zf_quadratic(R, k):
    a_k, r, R_k = leave_one_out(R, k)
    if r.size == 0:
        return a_k, 0.0
    return a_k, float(np.real(np.vdot(r, hermitian_solve(R_k, r))))


def _mmse_quadratic(R, p, k):
    a_k, r, R_k = leave_one_out(R, k)
    if r.size == 0:
        return a_k, 0.0
    M = np.diag(1.0 / np.delete(p, k)) + R_k
    return a_k, float(np.real(np.vdot(r, hermitian_solve(M, r))))


def loss_factor(scheme, R, powers, k):
    """SNR loss factor ``alpha_k`` in ``[0, 1)``.

    MRC: ``q / (a_k + q)`` with ``q = sum_{k' != k} p_k' |r_k'k|^2``.
    ZF: ``r^H R_k^-1 r / a_k``.
    MMSE: ``r^H (P_k^-1 + R_k)^-1 r / a_k``.
    """
    p = _ratios(powers)
    scheme = scheme.upper()
    if scheme == "MRC":
        a_k, q = _mrc_interference(R, p, k)
        return q / (a_k + q)
    if scheme == "ZF":
        a_k, q = _zf_quadratic(R, k)
        return q / a_k
    if scheme == "MMSE":
        a_k, q = _mmse_quadratic(R, p, k)
        return q / a_k
    raise ValueError(f"unknown scheme {scheme!r}; expected one of {SCHEMES}")


def sinr_mrc(R, powers, k):
    """``p_k a_k / (r^H P_k r / a_k + 1)``."""
    p = _ratios(powers)
    a_k, q = _mrc_interference(R, p, k)
    return p[k] * a_k / (q / a_k + 1.0)


def sinr_zf(R, powers, k, form="reduced"):
    """ZF SINR.

    ``form="reduced"`` gives ``p_k (a_k - r^H R_k^-1 r)``; ``form="inverse"``
    gives ``p_k / [R^-1]_kk``.  The two agree algebraically.
    """
    p = _ratios(powers)
    if form == "inverse":
        return p[k] / float(np.real(hermitian_inverse(R)[k, k]))
    if form != "reduced":
        raise ValueError(f"unknown form {form!r}")
    a_k, q = _zf_quadratic(R, k)
    return p[k] * (a_k - q)


def sinr_mmse(R, powers, k):
    """``p_k (a_k - r^H (P_k^-1 + R_k)^-1 r)``."""
    p = _ratios(powers)
    a_k, q = _mmse_quadratic(R, p, k)
    return p[k] * (a_k - q)


_CLOSED_FORMS = {"MRC": sinr_mrc, "ZF": sinr_zf, "MMSE": sinr_mmse}


def sinr(scheme, R, powers):
    """Closed-form SINR of every user, shape (K,)."""
    fn = _CLOSED_FORMS.get(scheme.upper())
    if fn is None:
        raise ValueError(f"unknown scheme {scheme!r}; expected one of {SCHEMES}")
    return np.array([fn(R, powers, k) for k in range(np.asarray(R).shape[0])])


def rate_and_mse(gamma):
    """Per-user rates ``log2(1+gamma)`` and MSEs ``1/(1+gamma)`` plus their sums.

    Returns
    -------
    rate, mse : ndarray
    sum_rate, sum_mse : float
    """
    gamma = np.asarray(gamma, dtype=float)
    rate = np.log2(1.0 + gamma)
    mse = 1.0 / (1.0 + gamma)
    return rate, mse, float(np.sum(rate)), float(np.sum(mse))


def performance_bounds(R, powers):
    """Interference-free limits ``gamma_max = p_k a_k`` and the implied rate and MSE."""
    p = _ratios(powers)
    gamma_max = p * np.real(np.diagonal(R))
    rate, mse, _, _ = rate_and_mse(gamma_max)
    return gamma_max, rate, mse


def two_user_closed_forms(a1, a2, p1, p2, rho):
    """SINR of user 1 in a two-user system for MRC, ZF and MMSE.

    ``rho`` is the squared correlation coefficient of the two channels.
    """
    g = p2 * a2
    base = p1 * a1
    return (
        base * (1.0 - g * rho / (1.0 + g * rho)),
        base * (1.0 - rho),
        base * (1.0 - g * rho / (1.0 + g)),
    )


def mrc_zf_crossover(a2, p2):
    """Correlation above which MRC beats ZF for user 1: ``1 - 1/(p2 a2)``."""
    return 1.0 - 1.0 / (p2 * a2)


@dataclass(frozen=True)
class SinrReport:
    """Per-user performance of one scheme on one channel realisation."""

    scheme: str
    gamma: np.ndarray
    alpha_loss: np.ndarray
    eff_gain: np.ndarray
    rate: np.ndarray
    mse: np.ndarray
    sum_rate: float
    sum_mse: float


def sinr_report(scheme, R, powers):
    """Report built from the unified form ``gamma = p a (1 - alpha)``."""
    R = np.asarray(R)
    p = _ratios(powers)
    K = R.shape[0]
    scheme = scheme.upper()
    alpha = np.array([loss_factor(scheme, R, p, k) for k in range(K)])
    eff_gain = np.real(np.diagonal(R)) * (1.0 - alpha)
    gamma = p * eff_gain
    rate, mse, sum_rate, sum_mse = rate_and_mse(gamma)
    return SinrReport(scheme, gamma, alpha, eff_gain, rate, mse, sum_rate, sum_mse)
