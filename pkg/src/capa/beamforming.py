"""Linear receive beamformers expressed through the channel correlation matrix.

A beamformer for user ``k`` is a linear combination of the user channels,
``w_k(r) = sum_k' A[k', k] h_k'(r)``, so every scheme is a ``K x K`` weight
matrix ``A``:

========  ==========================
scheme    A
========  ==========================
MRC       ``I``
ZF        ``R^-1``
MMSE      ``(I + diag(p) R)^-1``
========  ==========================

with ``p_k = P_k / sigma^2``.  The same matrices work for a discrete array
once ``R`` is replaced by ``H^H H``.
"""

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .exceptions import AssumptionViolation

__all__ = [
    "SCHEMES",
    "MAX_CONDITION",
    "PowerProfile",
    "WeightMatrix",
    "check_conditioning",
    "hermitian_inverse",
    "hermitian_solve",
    "leave_one_out",
    "mrc_weights",
    "zf_weights",
    "mmse_weights",
    "weight_matrix",
    "reduced_zf_coefficients",
    "reduced_mmse_coefficients",
    "ScalarFilter",
    "scalar_filter",
    "generic_scalar_filter",
    "evaluate_beamformer",
]

SCHEMES = ("MRC", "ZF", "MMSE")
MAX_CONDITION = 1e12


@dataclass(frozen=True)
class PowerProfile:
    """Transmit powers and noise variance of the K users.

    Only the ratios ``p_k = P_k / sigma^2`` enter the SINR; the absolute
    values matter for the scalar filter ``beta``.
    """

    powers: np.ndarray
    noise_variance: float = 1.0

    def __post_init__(self):
        powers = np.atleast_1d(np.asarray(self.powers, dtype=float)).copy()
        if powers.ndim != 1 or np.any(~(powers > 0)):
            raise ValueError("powers must be a 1-D array of positive values")
        if not self.noise_variance > 0:
            raise ValueError("noise variance must be positive")
        powers.setflags(write=False)
        object.__setattr__(self, "powers", powers)
        object.__setattr__(self, "noise_variance", float(self.noise_variance))

    @classmethod
    def from_layout(cls, layout):
        return cls(layout.powers, layout.noise_variance)

    @classmethod
    def from_ratios(cls, ratios):
        """Profile with unit noise variance, so that ``powers == ratios``."""
        return cls(ratios, 1.0)

    @property
    def K(self):
        return self.powers.shape[0]

    @property
    def ratios(self):
        return self.powers / self.noise_variance

    @property
    def P(self):
        """``diag(p_1, ..., p_K)``."""
        return np.diag(self.ratios)

    def leave_one_out(self, k):
        """Ratios of every user except ``k``."""
        return np.delete(self.ratios, k)

    def scaled(self, factor):
        return PowerProfile(self.powers * factor, self.noise_variance)


@dataclass(frozen=True)
class WeightMatrix:
    """Weight matrix ``A``; column ``k`` holds the coefficients of ``w_k``."""

    A: np.ndarray
    scheme: str

    @property
    def K(self):
        return self.A.shape[0]

    def column(self, k):
        return self.A[:, k]


def _as_profile(powers, K):
    profile = powers if isinstance(powers, PowerProfile) else PowerProfile.from_ratios(powers)
    if profile.K != K:
        raise ValueError(f"power profile has {profile.K} users, correlation matrix has {K}")
    return profile


def check_conditioning(R, max_condition=MAX_CONDITION):
    """Reject a correlation matrix that is not safely positive definite.

    Returns the 2-norm condition number.
    """
    R = np.asarray(R)
    if R.ndim != 2 or R.shape[0] != R.shape[1]:
        raise ValueError(f"correlation matrix must be square, got shape {R.shape}")
    if not np.all(np.isfinite(R)):
        raise AssumptionViolation("correlation matrix has non-finite entries")
    ev = np.linalg.eigvalsh(R)
    if ev[0] <= 0 or ev[-1] / ev[0] > max_condition:
        cond = np.inf if ev[0] <= 0 else ev[-1] / ev[0]
        raise AssumptionViolation(
            f"user channels are numerically dependent (condition number {cond:.3g} "
            f"exceeds {max_condition:.0e})"
        )
    return ev[-1] / ev[0]


def hermitian_solve(M, B):
    """Solve ``M X = B`` for Hermitian positive definite ``M`` by Cholesky."""
    try:
        factor = scipy.linalg.cho_factor(M, lower=True, check_finite=True)
    except np.linalg.LinAlgError as exc:
        raise AssumptionViolation(f"matrix is not positive definite: {exc}") from None
    return scipy.linalg.cho_solve(factor, B)


def hermitian_inverse(M):
    """Inverse of a Hermitian positive definite matrix, symmetrised."""
    M = np.asarray(M)
    X = hermitian_solve(M, np.eye(M.shape[0], dtype=np.result_type(M, float)))
    return 0.5 * (X + X.conj().T)


def leave_one_out(R, k):
    """Split ``R`` around user ``k``.

    Returns
    -------
    a_k : float
        Diagonal entry ``R[k, k]``.
    r : ndarray, shape (K-1,)
        Correlations ``R[k', k]`` of the other users with user ``k``.
    R_k : ndarray, shape (K-1, K-1)
        ``R`` with row and column ``k`` removed.
    """
    R = np.asarray(R)
    K = R.shape[0]
    if not 0 <= k < K:
        raise IndexError(f"user index {k} out of range for K={K}")
    others = np.delete(np.arange(K), k)
    return float(np.real(R[k, k])), R[others, k], R[np.ix_(others, others)]


def mrc_weights(K):
    """Matched filter: every user combines with its own channel."""
    if K < 1:
        raise ValueError(f"K must be >= 1, got {K}")
    return WeightMatrix(np.eye(K, dtype=complex), "MRC")


def zf_weights(R, max_condition=MAX_CONDITION):
    """Zero-forcing weights ``A = R^-1``.

    Raises
    ------
    AssumptionViolation
        If ``R`` is singular or its condition number exceeds
        ``max_condition``.
    """
    check_conditioning(R, max_condition)
    return WeightMatrix(hermitian_inverse(R), "ZF")


def mmse_weights(R, powers, max_condition=MAX_CONDITION):
    """MMSE weights ``A = (I + diag(p) R)^-1``.

    Computed as ``(diag(p)^-1 + R)^-1 diag(p)^-1`` so that the only
    factorization is of a Hermitian positive definite matrix.
    """
    R = np.asarray(R)
    check_conditioning(R, max_condition)
    p = _as_profile(powers, R.shape[0]).ratios
    M = np.diag(1.0 / p) + R
    A = hermitian_solve(0.5 * (M + M.conj().T), np.diag(1.0 / p).astype(complex))
    return WeightMatrix(A, "MMSE")


def weight_matrix(scheme, R, powers=None):
    """Dispatch on the scheme name (case-insensitive)."""
    scheme = scheme.upper()
    if scheme == "MRC":
        return mrc_weights(np.asarray(R).shape[0])
    if scheme == "ZF":
        return zf_weights(R)
    if scheme == "MMSE":
        if powers is None:
            raise ValueError("MMSE weights need the power profile")
        return mmse_weights(R, powers)
    raise ValueError(f"unknown scheme {scheme!r}; expected one of {SCHEMES}")


def _embed(k, K, tail):
    c = np.empty(K, dtype=complex)
    c[k] = 1.0
    c[np.arange(K) != k] = -tail
    return c


def reduced_zf_coefficients(k, R):
    """Coefficients of ``h_k`` minus its projection onto the other channels.

    ``c[k] = 1`` and the remaining entries are ``-R_k^-1 r``.
    """
    _, r, R_k = leave_one_out(R, k)
    K = np.asarray(R).shape[0]
    if K == 1:
        return np.ones(1, dtype=complex)
    return _embed(k, K, hermitian_solve(R_k, r))


def reduced_mmse_coefficients(k, R, powers):
    """Coefficients of the per-user MMSE beamformer with unit weight on ``h_k``.

    ``c[k] = 1`` and the remaining entries are ``-(P_k^-1 + R_k)^-1 r`` where
    ``P_k`` is the diagonal of the other users' SNR ratios.
    """
    _, r, R_k = leave_one_out(R, k)
    K = np.asarray(R).shape[0]
    if K == 1:
        return np.ones(1, dtype=complex)
    p_k = _as_profile(powers, K).leave_one_out(k)
    return _embed(k, K, hermitian_solve(np.diag(1.0 / p_k) + R_k, r))


@dataclass(frozen=True)
class ScalarFilter:
    """Per-user post-combining scalars minimising the MSE."""

    beta: np.ndarray
    scheme: str


def scalar_filter(scheme, k, R, powers):
    """Closed-form MSE-optimal scalar ``beta_k`` for the given scheme.

    The beamformer scaling each expression assumes is: ``h_k`` for MRC,
    column ``k`` of ``R^-1`` for ZF, and the reduced coefficients with unit
    weight on ``h_k`` for MMSE.

    Parameters
    ----------
    scheme : {"MRC", "ZF", "MMSE"}
    k : int
    R : ndarray, shape (K, K)
    powers : PowerProfile
        Absolute powers and noise variance (``beta`` is not scale free).
    """
    R = np.asarray(R)
    prof = _as_profile(powers, R.shape[0])
    P, s2 = prof.powers, prof.noise_variance
    a_k, r, R_k = leave_one_out(R, k)
    scheme = scheme.upper()
    if scheme == "MRC":
        interference = np.sum(P * np.abs(R[k, :]) ** 2) / a_k
        return np.sqrt(P[k]) / (interference + s2)
    if scheme == "ZF":
        Rinv_kk = float(np.real(hermitian_inverse(R)[k, k]))
        return np.sqrt(P[k]) / (P[k] + s2 * Rinv_kk)
    if scheme == "MMSE":
        if R.shape[0] == 1:
            residual = a_k
        else:
            p_k = prof.leave_one_out(k)
            x = hermitian_solve(np.diag(1.0 / p_k) + R_k, r)
            residual = a_k - float(np.real(np.vdot(r, x)))
        return np.sqrt(P[k]) / (P[k] * residual + s2)
    raise ValueError(f"unknown scheme {scheme!r}; expected one of {SCHEMES}")


def generic_scalar_filter(coefficients, k, R, powers):
    """MSE-optimal ``beta_k`` for an arbitrary beamformer ``w_k = h c``.

    ``beta = sqrt(P_k) conj(g_kk) / (sum_k' P_k' |g_kk'|^2 + sigma^2 ||w||^2)``
    with ``g_kk' = int w_k^* h_k' = (c^H R)_k'``.
    """
    R = np.asarray(R)
    prof = _as_profile(powers, R.shape[0])
    c = np.asarray(coefficients)
    g = np.conj(c) @ R
    norm2 = float(np.real(np.vdot(c, R @ c)))
    denom = np.sum(prof.powers * np.abs(g) ** 2) + prof.noise_variance * norm2
    return np.sqrt(prof.powers[k]) * np.conj(g[k]) / denom


def evaluate_beamformer(weights, H, k, node_index):
    """Value of ``w_k`` at one quadrature node (or a slice/array of nodes)."""
    A = weights.A if isinstance(weights, WeightMatrix) else np.asarray(weights)
    H = getattr(H, "H", H)
    if not 0 <= k < A.shape[1]:
        raise IndexError(f"user index {k} out of range for K={A.shape[1]}")
    return A[:, k] @ H[:, node_index]
