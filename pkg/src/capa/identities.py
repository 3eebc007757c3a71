"""Numerical verification of the operator and matrix identities behind the beamformers.

Integral operators of the form

    K(r, r') = d delta(r - r') - phi(r) C phi(r')^H

over a finite family ``phi = [phi_1, ..., phi_K']`` are closed under
composition: with ``Psi`` the Gram matrix of the family,

    (K1 o K2)  ->  delta weight d1 d2,  coefficient d1 C2 + d2 C1 - C1 Psi C2.

Every identity is therefore checked exactly in ``K' x K'`` coefficient
algebra, never by discretising a Dirac delta.

Each operator carries a running bound on the size of the terms that built its
coefficient, and operator identities report the coefficient residual relative
to that bound.  The operator-norm distance ``||Psi^1/2 (C1 - C2) Psi^1/2||``
is also available; it cannot be driven below roughly ``eps * cond(Psi)``,
which for nearly parallel user channels reaches ``1e-7``.
"""

from dataclasses import dataclass, field

import numpy as np

from .beamforming import (
    PowerProfile,
    hermitian_inverse,
    hermitian_solve,
    leave_one_out,
    mmse_weights,
    reduced_mmse_coefficients,
    scalar_filter,
    zf_weights,
)
from .exceptions import RankDeficiencyError
from .geometry import Aperture
from .metrics import sinr_mmse
from .quadrature import gram, tensor_grid
from .scenario import Scenario

__all__ = [
    "OperatorEigData",
    "KernelOperator",
    "gram_matrix",
    "operator_family",
    "vector_angle",
    "function_residual",
    "verify_operator_family",
    "verify_operator_squares",
    "blockwise_first_column",
    "verify_blockwise_inverse",
    "gram_schmidt",
    "verify_projection_kernel",
    "verify_zero_interference",
    "verify_loss_chain",
    "verify_whitening",
    "verify_mmse_equivalences",
    "AsymptoticTable",
    "verify_asymptotics",
    "IDENTITIES",
    "IdentityResult",
    "SuiteReport",
    "random_instance",
    "run_identity_suite",
]

# relative eigenvalue floor below which a Gram matrix counts as rank deficient
_RANK_TOL = 1e-13


def _bbar_spectrum(lam):
    s = np.sqrt(1.0 + lam)
    return (1.0 + s) / (lam * s)


def _b_spectrum(lam):
    return (1.0 + np.sqrt(1.0 + lam)) / lam


def _herm(M):
    return 0.5 * (M + M.conj().T)


def gram_matrix(phi, grid):
    """Gram matrix ``Psi[i, j] = int phi_i^* phi_j`` of sampled functions.

    Raises
    ------
    RankDeficiencyError
        If the functions are (numerically) linearly dependent.
    """
    weights = grid.weights if hasattr(grid, "weights") else np.asarray(grid)
    Psi = gram(np.atleast_2d(phi), weights)
    ev = np.linalg.eigvalsh(Psi)
    if ev[0] <= _RANK_TOL * ev[-1]:
        raise RankDeficiencyError("sampled functions are linearly dependent")
    return Psi


@dataclass(frozen=True)
class OperatorEigData:
    """Eigen-decomposition ``Psi = U diag(lam) U^H`` and the derived spectra."""

    gram: np.ndarray
    eigvecs: np.ndarray
    eigvals: np.ndarray

    @classmethod
    def from_gram(cls, Psi):
        Psi = _herm(np.asarray(Psi, dtype=complex))
        lam, U = np.linalg.eigh(Psi)
        if lam[0] <= 0:
            raise RankDeficiencyError(f"Gram matrix is not positive definite (min eigenvalue {lam[0]:.3g})")
        return cls(Psi, U, lam)

    @property
    def lambda_b(self):
        return _b_spectrum(self.eigvals)

    @property
    def lambda_bbar(self):
        return _bbar_spectrum(self.eigvals)

    def from_spectrum(self, spectrum):
        U = self.eigvecs
        return _herm((U * spectrum) @ U.conj().T)

    def unitarity_residual(self):
        U = self.eigvecs
        return float(np.max(np.abs(U.conj().T @ U - np.eye(U.shape[0]))))


def operator_family(Psi):
    """Coefficient matrices of ``B``, ``Bbar`` and ``Cbar`` for a Gram matrix.

    ``Bbar`` is an inverse square root of ``C = delta + phi phi^H``, ``B`` a
    square root, and ``Cbar = (I + Psi)^-1`` the coefficient of ``C^-1``.
    The coefficient of ``C`` itself is ``-I``.

    Both spectra grow like ``2 / lam`` for small eigenvalues, which would
    amplify the eigen-decomposition's rounding by the condition number of
    ``Psi``.  They are therefore applied as ``Psi^-1 U diag(lam f(lam)) U^H``:
    the bounded factor goes through the eigenbasis and the ``1/lam`` through
    a Cholesky solve.
    """
    eig = OperatorEigData.from_gram(Psi)
    lam = eig.eigvals
    B = _herm(hermitian_solve(eig.gram, eig.from_spectrum(lam * eig.lambda_b)))
    Bbar = _herm(hermitian_solve(eig.gram, eig.from_spectrum(lam * eig.lambda_bbar)))
    Cbar = hermitian_inverse(np.eye(eig.gram.shape[0]) + eig.gram)
    return B, Bbar, Cbar


@dataclass(frozen=True)
class KernelOperator:
    """Kernel ``delta * delta(r - r') - phi(r) C phi(r')^H``.

    Parameters
    ----------
    gram : ndarray, shape (K', K')
        Gram matrix of the family ``phi``.
    coefficient : ndarray, shape (K', K')
    delta : float
        Weight of the Dirac term (0 for a pure finite-rank kernel).
    basis : ndarray, shape (K', N), optional
        Samples of ``phi`` on a quadrature grid, needed only for the
        sample-based methods.
    weights : ndarray, shape (N,), optional
        Quadrature weights matching ``basis``.
    """

    gram: np.ndarray
    coefficient: np.ndarray
    delta: float = 1.0
    basis: np.ndarray = None
    weights: np.ndarray = None
    magnitude: float = None

    def __post_init__(self):
        if self.magnitude is None:
            object.__setattr__(self, "magnitude", float(np.linalg.norm(self.coefficient, 2)))

    @property
    def rank(self):
        return self.gram.shape[0]

    def compose(self, other):
        """Kernel of ``self o other`` (``self`` applied last)."""
        if other.gram is not self.gram and not np.array_equal(other.gram, self.gram):
            raise ValueError("operators are defined over different function families")
        C1, C2 = self.coefficient, other.coefficient
        d1, d2 = self.delta, other.delta
        C = d1 * C2 + d2 * C1 - C1 @ self.gram @ C2
        m1, m2 = self.magnitude, other.magnitude
        bound = abs(d1) * m2 + abs(d2) * m1 + m1 * np.linalg.norm(self.gram, 2) * m2
        return KernelOperator(self.gram, C, d1 * d2, self.basis, self.weights, float(bound))

    __matmul__ = compose

    def apply(self, x):
        """Coefficients of ``K f`` for ``f = phi x``."""
        x = np.asarray(x)
        return self.delta * x - self.coefficient @ (self.gram @ x)

    def apply_samples(self, f):
        """Samples of ``K f`` for a sampled function ``f`` on the basis grid."""
        proj = (np.conj(self.basis) * self.weights) @ f
        return self.delta * f - (self.coefficient @ proj) @ self.basis

    def smooth_kernel(self, i, j):
        """Finite-rank part ``-phi(r_i) C phi(r_j)^H`` at node index pairs."""
        left = self.basis[:, i]
        right = np.conj(self.basis[:, j])
        return -np.einsum("an,ab,bn->n", left, self.coefficient, right)

    def _whitened(self, coefficient):
        L = np.linalg.cholesky(self.gram)
        return L.conj().T @ coefficient @ L

    def norm(self):
        """Operator norm (on ``L^2``, the Dirac term acting as ``delta * I``)."""
        M = self.delta * np.eye(self.rank) - self._whitened(self.coefficient)
        return max(abs(self.delta), float(np.linalg.norm(M, 2)))

    def distance(self, other):
        """Operator-norm distance ``||self - other||``."""
        dM = self._whitened(self.coefficient - other.coefficient)
        dd = self.delta - other.delta
        return max(abs(dd), float(np.linalg.norm(dd * np.eye(self.rank) - dM, 2)))

    def residual(self, other):
        """Coefficient mismatch relative to the size of the terms involved.

        ``(|d1 - d2| + ||C1 - C2||) / max(1, m1, m2)`` where ``m`` is the
        running term bound of each side (``||C||`` for a freshly built
        operator).
        """
        dC = float(np.linalg.norm(self.coefficient - other.coefficient, 2))
        return (abs(self.delta - other.delta) + dC) / max(1.0, self.magnitude, other.magnitude)


def _family_operators(Psi, basis=None, weights=None):
    B, Bbar, Cbar = operator_family(Psi)
    Psi = OperatorEigData.from_gram(Psi).gram
    n = Psi.shape[0]

    def op(C, d=1.0):
        return KernelOperator(Psi, C, d, basis, weights)

    return {
        "I": op(np.zeros((n, n), dtype=complex)),
        "C": op(-np.eye(n, dtype=complex)),
        "B": op(B),
        "Bbar": op(Bbar),
        "Cbar": op(Cbar),
    }


def verify_operator_squares(Psi):
    """Residuals of ``Bbar o Bbar = Cbar`` and ``B o B = C``."""
    ops = _family_operators(Psi)
    return {
        "whitening_squared_is_inverse": (ops["Bbar"] @ ops["Bbar"]).residual(ops["Cbar"]),
        "square_root_squared_is_correlation": (ops["B"] @ ops["B"]).residual(ops["C"]),
    }


def verify_operator_family(Psi):
    """Residuals of every identity among ``B``, ``Bbar``, ``C`` and ``Cbar``."""
    ops = _family_operators(Psi)
    I, B, Bbar, C, Cbar = (ops[k] for k in ("I", "B", "Bbar", "C", "Cbar"))
    lhs = (B @ Bbar) @ C
    rhs = B @ (Bbar @ C)
    out = {
        "eigenbasis_unitary": OperatorEigData.from_gram(Psi).unitarity_residual(),
        "whitening_inverts_correlation": (Bbar @ C @ Bbar).residual(I),
        "square_root_inverse_pair": max((Bbar @ B).residual(I), (B @ Bbar).residual(I)),
        "correlation_inverse": max((Cbar @ C).residual(I), (C @ Cbar).residual(I)),
        "kernel_composition_associative": lhs.residual(rhs),
    }
    out.update(verify_operator_squares(Psi))
    return out


def vector_angle(u, v):
    """Angle in ``[0, pi/2]`` between two complex vectors, ignoring a complex scale."""
    u = np.asarray(u, dtype=complex)
    v = np.asarray(v, dtype=complex)
    nu, nv = np.linalg.norm(u), np.linalg.norm(v)
    if nu == 0 or nv == 0:
        raise ValueError("angle undefined for a zero vector")
    u, v = u / nu, v / nv
    c = np.vdot(u, v)
    return float(np.arctan2(np.linalg.norm(v - c * u), abs(c)))


def function_residual(x, y, R):
    """``||h (x - y)|| / ||h y||`` for coefficient vectors in a basis with Gram ``R``."""
    d = np.asarray(x) - np.asarray(y)
    num = float(np.real(np.vdot(d, R @ d)))
    den = float(np.real(np.vdot(y, R @ y)))
    return np.sqrt(max(num, 0.0) / den)


def blockwise_first_column(R, k):
    """First column of the inverse of ``R`` reordered with user ``k`` first.

    Equals ``[1, -R_k^-1 r] / (a_k - r^H R_k^-1 r)``.
    """
    a_k, r, R_k = leave_one_out(R, k)
    if r.size == 0:
        return np.array([1.0 / a_k], dtype=complex)
    x = hermitian_solve(R_k, r)
    schur = a_k - float(np.real(np.vdot(r, x)))
    return np.concatenate([[1.0], -x]) / schur


def verify_blockwise_inverse(R):
    """Max over users of the relative mismatch against a direct LU inverse."""
    R = np.asarray(R)
    K = R.shape[0]
    Rinv = np.linalg.inv(R)
    worst = 0.0
    for k in range(K):
        order = np.concatenate([[k], np.delete(np.arange(K), k)])
        direct = Rinv[order, k]
        col = blockwise_first_column(R, k)
        worst = max(worst, float(np.max(np.abs(col - direct)) / np.max(np.abs(direct))))
    return worst


def gram_schmidt(phi, grid):
    """Orthonormalise sampled functions under the quadrature inner product.

    Modified Gram-Schmidt with one full re-orthogonalisation pass.

    Raises
    ------
    RankDeficiencyError
        If a function lies (numerically) in the span of the previous ones.
    """
    weights = grid.weights if hasattr(grid, "weights") else np.asarray(grid)
    phi = np.atleast_2d(np.asarray(phi, dtype=complex))
    out = []
    for i, v in enumerate(phi):
        v = v.copy()
        n0 = np.sqrt(np.sum(weights * np.abs(v) ** 2))
        for _ in range(2):
            for q in out:
                v -= np.sum(weights * np.conj(q) * v) * q
        n = np.sqrt(np.sum(weights * np.abs(v) ** 2))
        if not n > 1e-10 * n0:
            raise RankDeficiencyError(f"function {i} is linearly dependent on the previous ones")
        out.append(v / n)
    return np.array(out)


def _wnorm(f, weights):
    return float(np.sqrt(np.sum(weights * np.abs(f) ** 2)))


def _winner(f, g, weights):
    return np.sum(weights * np.conj(f) * g)


def verify_projection_kernel(k, H, R, grid, n_pairs=1000, rng=None):
    """Checks on the projection onto the span of the other users' channels.

    The kernel ``h_-k(r) R_k^-1 h_-k(r')^H`` is idempotent, reproduces each
    interferer, leaves ``h_k - P h_k`` orthogonal to every interferer, and
    coincides with ``sum_n psi_n(r) psi_n(r')^*`` for an orthonormal basis
    ``psi`` of the same span.
    """
    H = getattr(H, "H", H)
    K = H.shape[0]
    names = (
        "projection_idempotent",
        "projection_reproduces_interferers",
        "projection_matches_orthonormal_basis",
        "projection_residual_orthogonal",
    )
    if K == 1:
        return dict.fromkeys(names, 0.0)
    rng = np.random.default_rng(0) if rng is None else rng
    w = grid.weights
    others = np.delete(np.arange(K), k)
    _, _, R_k = leave_one_out(R, k)
    Phi = H[others]
    P = KernelOperator(R_k, -hermitian_inverse(R_k), 0.0, Phi, w)

    reproduce = max(
        _wnorm(P.apply_samples(H[j]) - H[j], w) / _wnorm(H[j], w) for j in others
    )
    h_k = H[k]
    proj = P.apply_samples(h_k)
    resid = h_k - proj
    nres = _wnorm(resid, w)
    orth = max(abs(_winner(H[j], resid, w)) / (_wnorm(H[j], w) * nres) for j in others)
    nproj = _wnorm(proj, w)
    if nproj > 0:
        orth = max(orth, abs(_winner(proj, resid, w)) / (nproj * nres))

    psi = gram_schmidt(Phi, w)
    i = rng.integers(0, grid.N, n_pairs)
    j = rng.integers(0, grid.N, n_pairs)
    from_R = P.smooth_kernel(i, j)
    from_psi = np.einsum("an,an->n", psi[:, i], np.conj(psi[:, j]))
    scale = np.max(np.sum(np.abs(psi) ** 2, axis=0))
    dual = float(np.max(np.abs(from_R - from_psi)) / scale)

    return dict(zip(names, (P.compose(P).residual(P), reproduce, dual, orth)))


def verify_zero_interference(H, grid, R):
    """Quadrature inner products of the ZF beamformers with every channel.

    Returns
    -------
    off_diagonal : float
        ``max |<w_k, h_k'>| / (||w_k|| ||h_k'||)`` over ``k != k'``.
    diagonal : float
        ``max |<w_k, h_k> - 1|``.
    """
    H = getattr(H, "H", H)
    A = zf_weights(R).A
    W = A.T @ H
    G = (np.conj(W) * grid.weights) @ H.T
    nw = np.sqrt(np.sum(grid.weights * np.abs(W) ** 2, axis=1))
    nh = np.sqrt(np.sum(grid.weights * np.abs(H) ** 2, axis=1))
    K = H.shape[0]
    off = np.abs(G) / np.outer(nw, nh)
    off[np.diag_indices(K)] = 0.0
    return float(np.max(off)), float(np.max(np.abs(np.diagonal(G) - 1.0)))


def verify_loss_chain(R, powers, k):
    """Violation of ``a_k > r^H R_k^-1 r >= r^H (P_k^-1 + R_k)^-1 r >= 0``.

    Returns 0 when the chain holds, otherwise the largest violation
    relative to ``a_k`` (``inf`` if the strict inequality fails).
    """
    a_k, r, R_k = leave_one_out(R, k)
    if r.size == 0:
        return 0.0
    p = powers.ratios if isinstance(powers, PowerProfile) else np.asarray(powers)
    q_zf = float(np.real(np.vdot(r, hermitian_solve(R_k, r))))
    q_mmse = float(np.real(np.vdot(r, hermitian_solve(np.diag(1.0 / np.delete(p, k)) + R_k, r))))
    if not a_k > q_zf:
        return np.inf
    return max(0.0, q_mmse - q_zf, -q_mmse) / a_k


def _embed(k, K, M):
    out = np.zeros((K, K), dtype=complex)
    idx = np.delete(np.arange(K), k)
    out[np.ix_(idx, idx)] = M
    return out


def verify_whitening(k, R, powers, rng=None, n_vectors=4):
    """Checks on the whitening filter of user ``k``'s interference-plus-noise.

    With ``phi = h_-k diag(p_-k)^1/2`` the interference-plus-noise correlation
    operator is ``C_k = delta + phi phi^H`` and ``Bbar_k`` its inverse square
    root.  Checked:

    * ``Bbar_k o C_k o Bbar_k = delta``;
    * matched filtering of the whitened channel ``Bbar_k h_k`` achieves the
      MMSE SINR;
    * ``Bbar_k o Bbar_k`` applied to ``h_k`` gives the reduced MMSE beamformer;
    * ``int |B_k w|^2 = x^H (R + R P_-k R) x`` for ``w = h x``.
    """
    R = np.asarray(R)
    K = R.shape[0]
    names = (
        "power_weighted_whitening",
        "whitened_matched_filter_sinr",
        "double_whitening_gives_mmse",
        "interference_energy_transform",
    )
    if K == 1:
        return dict.fromkeys(names, 0.0)
    rng = np.random.default_rng(0) if rng is None else rng
    profile = powers if isinstance(powers, PowerProfile) else PowerProfile.from_ratios(powers)
    p = profile.ratios
    _, _, R_k = leave_one_out(R, k)
    D = np.diag(np.sqrt(np.delete(p, k)))
    Ck = _herm(D @ R_k @ D)
    ops = _family_operators(Ck)
    inverts = (ops["Bbar"] @ ops["C"] @ ops["Bbar"]).residual(ops["I"])

    e_k = np.zeros(K, dtype=complex)
    e_k[k] = 1.0
    B, Bbar, Cbar = (_embed(k, K, D @ ops[n].coefficient @ D) for n in ("B", "Bbar", "Cbar"))
    v = e_k - Bbar @ (R @ e_k)
    g_white = p[k] * float(np.real(np.vdot(v, R @ v)))
    g_mmse = sinr_mmse(R, p, k)
    white = abs(g_white - g_mmse) / g_mmse

    twice = function_residual(e_k - Cbar @ (R @ e_k), reduced_mmse_coefficients(k, R, profile), R)

    Pk = np.diag(np.where(np.arange(K) == k, 0.0, p))
    M = R + R @ Pk @ R
    transform = 0.0
    for _ in range(n_vectors):
        x = rng.standard_normal(K) + 1j * rng.standard_normal(K)
        u = x - B @ (R @ x)
        lhs = float(np.real(np.vdot(u, R @ u)))
        rhs = float(np.real(np.vdot(x, M @ x)))
        transform = max(transform, abs(lhs - rhs) / rhs)
    return dict(zip(names, (inverts, white, twice, transform)))


def verify_mmse_equivalences(R, powers, k, rng=None, n_probe=1000):
    """Agreement of the MMSE beamformer's different closed forms.

    * the reduced per-user coefficients are parallel to column ``k`` of
      ``(I + P R)^-1``;
    * the direct MSE-minimising solution built from
      ``(I + P^1/2 R P^1/2)^-1`` equals ``beta_k`` times the reduced
      coefficients;
    * ``I - (P^-1 + R)^-1 R = (I + P R)^-1``;
    * no random perturbation of the reduced coefficients beats its SINR.
    """
    R = np.asarray(R)
    K = R.shape[0]
    rng = np.random.default_rng(0) if rng is None else rng
    profile = powers if isinstance(powers, PowerProfile) else PowerProfile.from_ratios(powers)
    p = profile.ratios
    A = mmse_weights(R, profile).A
    c = reduced_mmse_coefficients(k, R, profile)
    parallel = vector_angle(c, A[:, k])

    sq = np.sqrt(p)
    Ct = hermitian_inverse(np.eye(K) + _herm(sq[:, None] * R * sq[None, :]))
    e_k = np.eye(K, dtype=complex)[:, k]
    direct = np.sqrt(profile.powers[k]) / profile.noise_variance * (
        e_k - sq * (Ct @ (sq * R[:, k]))
    )
    beta = scalar_filter("MMSE", k, R, profile)
    direct_res = function_residual(direct, beta * c, R)

    lhs = np.eye(K) - hermitian_solve(np.diag(1.0 / p) + R, R)
    rhs = np.linalg.inv(np.eye(K) + np.diag(p) @ R)
    forms = float(np.max(np.abs(lhs - rhs)) / np.max(np.abs(rhs)))

    gamma = sinr_mmse(R, p, k)
    u = rng.standard_normal((K, n_probe)) + 1j * rng.standard_normal((K, n_probe))
    u /= np.linalg.norm(u, axis=0)
    t = 10.0 ** rng.uniform(-6, 0, n_probe)
    Cp = (c / np.linalg.norm(c))[:, None] + t * u
    g = np.conj(Cp).T @ R
    norm2 = np.real(np.sum(np.conj(Cp) * (R @ Cp), axis=0))
    sig = p[k] * np.abs(g[:, k]) ** 2
    interf = (np.abs(g) ** 2) @ p - sig
    gp = sig / (interf + norm2)
    probe = max(0.0, float(np.max(gp) - gamma) / gamma)

    return {
        "mmse_reduced_parallel_to_matrix": parallel,
        "mmse_direct_equals_scaled_reduced": direct_res,
        "mmse_matrix_forms_agree": forms,
        "mmse_local_optimality": probe,
    }


@dataclass(frozen=True)
class AsymptoticTable:
    """Column angles of the MMSE weights against MRC and ZF along a power sweep.

    ``to_mrc[i, k]`` and ``to_zf[i, k]`` are the angles for ``scales[i]``.
    """

    scales: np.ndarray
    to_mrc: np.ndarray
    to_zf: np.ndarray

    def monotonicity_violation(self):
        """Largest step against the expected direction (MRC rising, ZF falling)."""
        up = np.max(np.maximum(0.0, -np.diff(self.to_mrc, axis=0)), initial=0.0)
        down = np.max(np.maximum(0.0, np.diff(self.to_zf, axis=0)), initial=0.0)
        return float(max(up, down))

    def extremes(self):
        """``(max angle to MRC at the smallest scale, max angle to ZF at the largest)``."""
        return float(np.max(self.to_mrc[0])), float(np.max(self.to_zf[-1]))


def verify_asymptotics(R, powers, scales=None):
    """Sweep ``p -> scale * p`` and tabulate the MMSE column angles."""
    R = np.asarray(R)
    K = R.shape[0]
    profile = powers if isinstance(powers, PowerProfile) else PowerProfile.from_ratios(powers)
    scales = 10.0 ** np.arange(-8, 9) if scales is None else np.asarray(scales, dtype=float)
    Z = zf_weights(R).A
    I = np.eye(K)
    to_mrc = np.empty((len(scales), K))
    to_zf = np.empty((len(scales), K))
    for i, s in enumerate(scales):
        A = mmse_weights(R, profile.scaled(s)).A
        for k in range(K):
            to_mrc[i, k] = vector_angle(A[:, k], I[:, k])
            to_zf[i, k] = vector_angle(A[:, k], Z[:, k])
    return AsymptoticTable(scales, to_mrc, to_zf)


# name -> (description, default tolerance)
IDENTITIES = {
    "blockwise_inverse_column": ("first column of the reordered inverse via the Schur complement", 1e-9),
    "projection_idempotent": ("interference projection kernel composed with itself", 1e-9),
    "projection_reproduces_interferers": ("projection returns every interfering channel", 1e-8),
    "projection_matches_orthonormal_basis": ("projection kernel equals sum of psi psi^* (Gram-Schmidt)", 1e-8),
    "projection_residual_orthogonal": ("h_k minus its projection is orthogonal to the interferers", 1e-9),
    "zf_zero_interference": ("ZF beamformer inner products with other users' channels", 1e-8),
    "zf_unit_gain": ("ZF beamformer inner product with own channel equals one", 1e-8),
    "loss_factor_chain": ("a_k > r^H R_k^-1 r >= r^H (P_k^-1 + R_k)^-1 r >= 0", 1e-10),
    "eigenbasis_unitary": ("eigenvectors of the Gram matrix are orthonormal", 1e-10),
    "whitening_inverts_correlation": ("Bbar o C o Bbar = delta", 1e-10),
    "square_root_inverse_pair": ("Bbar o B = B o Bbar = delta", 1e-10),
    "correlation_inverse": ("Cbar o C = C o Cbar = delta", 1e-10),
    "whitening_squared_is_inverse": ("Bbar o Bbar = Cbar", 1e-10),
    "square_root_squared_is_correlation": ("B o B = C", 1e-10),
    "kernel_composition_associative": ("(B o Bbar) o C = B o (Bbar o C)", 1e-10),
    "power_weighted_whitening": ("whitening of the interference-plus-noise operator", 1e-9),
    "whitened_matched_filter_sinr": ("matched filter after whitening attains the MMSE SINR", 1e-9),
    "double_whitening_gives_mmse": ("Bbar_k o Bbar_k h_k is the reduced MMSE beamformer", 1e-9),
    "interference_energy_transform": ("int |B_k w|^2 equals the interference-plus-noise energy", 1e-10),
    "mmse_reduced_parallel_to_matrix": ("reduced MMSE coefficients parallel to (I + P R)^-1 column", 1e-8),
    "mmse_direct_equals_scaled_reduced": ("direct MSE solution equals beta times reduced beamformer", 1e-9),
    "mmse_matrix_forms_agree": ("I - (P^-1 + R)^-1 R = (I + P R)^-1", 1e-10),
    "mmse_local_optimality": ("random perturbations never exceed the MMSE SINR", 1e-9),
    "low_snr_mmse_is_mrc": ("MMSE column angle to MRC at p-scale 1e-8 (rad)", 1e-3),
    "high_snr_mmse_is_zf": ("MMSE column angle to ZF at p-scale 1e8 (rad)", 1e-3),
    "asymptotic_monotone": ("angles move monotonically along the p-scale sweep (rad)", 1e-12),
}


@dataclass
class IdentityResult:
    """Worst residual of one identity over all evaluated instances."""

    name: str
    description: str
    tolerance: float
    max_residual: float = 0.0
    evaluations: int = 0

    @property
    def passed(self):
        return self.evaluations > 0 and self.max_residual <= self.tolerance

    def record(self, value):
        value = float(value)
        if not np.isfinite(value):
            value = np.inf
        self.max_residual = max(self.max_residual, value)
        self.evaluations += 1


@dataclass
class SuiteReport:
    results: dict = field(default_factory=dict)

    @property
    def passed(self):
        return all(r.passed for r in self.results.values())

    def lines(self):
        width = max(len(n) for n in self.results)
        out = []
        for r in self.results.values():
            status = "PASS" if r.passed else "FAIL"
            out.append(
                f"{status}  {r.name:<{width}}  max={r.max_residual:.3e}  tol={r.tolerance:.0e}  "
                f"n={r.evaluations}  {r.description}"
            )
        return out


def random_instance(rng, K=None, order=8):
    """Random complex functions on an ``order x order`` grid over the unit square.

    Returns ``(H, grid, R, profile)`` with ``K`` drawn from 2..16 when not
    given, SNR ratios log-uniform in [0.1, 10] and a random noise variance.
    """
    grid = tensor_grid(Aperture(1.0, 1.0), order, order)
    K = int(rng.integers(2, 17)) if K is None else K
    H = rng.standard_normal((K, grid.N)) + 1j * rng.standard_normal((K, grid.N))
    ratios = 10.0 ** rng.uniform(-1, 1, K)
    noise = rng.uniform(0.1, 2.0)
    return H, grid, gram(H, grid.weights), PowerProfile(ratios * noise, noise)


def _check_instance(report, H, grid, R, profile, rng, n_pairs, n_probe):
    rec = lambda name, value: report.results[name].record(value)  # noqa: E731
    K = R.shape[0]
    rec("blockwise_inverse_column", verify_blockwise_inverse(R))
    off, diag = verify_zero_interference(H, grid, R)
    rec("zf_zero_interference", off)
    rec("zf_unit_gain", diag)
    for name, value in verify_operator_family(gram_matrix(H, grid)).items():
        rec(name, value)
    for k in range(K):
        rec("loss_factor_chain", verify_loss_chain(R, profile, k))
        for group in (
            verify_projection_kernel(k, H, R, grid, n_pairs, rng),
            verify_whitening(k, R, profile, rng),
            verify_mmse_equivalences(R, profile, k, rng, n_probe),
        ):
            for name, value in group.items():
                rec(name, value)
    table = verify_asymptotics(R, profile)
    low, high = table.extremes()
    rec("low_snr_mmse_is_mrc", low)
    rec("high_snr_mmse_is_zf", high)
    rec("asymptotic_monotone", table.monotonicity_violation())


def run_identity_suite(
    n_random=100,
    n_scenario=20,
    seed=0,
    tolerances=None,
    scenario=None,
    n_pairs=1000,
    n_probe=1000,
):
    """Evaluate every identity on random instances and on default-scenario draws.

    Parameters
    ----------
    n_random : int
        Number of random instances (sizes 2..16 on a 64-node grid).
    n_scenario : int
        Number of user drops from ``scenario``.
    tolerances : dict, optional
        Per-identity overrides of the default tolerances.
    scenario : Scenario, optional
        Defaults to :class:`capa.scenario.Scenario`.

    Returns
    -------
    SuiteReport
    """
    tolerances = dict(tolerances or {})
    unknown = set(tolerances) - set(IDENTITIES)
    if unknown:
        raise KeyError(f"unknown identities: {sorted(unknown)}")
    report = SuiteReport(
        {
            name: IdentityResult(name, desc, float(tolerances.get(name, tol)))
            for name, (desc, tol) in IDENTITIES.items()
        }
    )
    for i in range(n_random):
        rng = np.random.default_rng([seed, 1, i])
        H, grid, R, profile = random_instance(rng)
        _check_instance(report, H, grid, R, profile, rng, n_pairs, n_probe)
    scenario = Scenario() if scenario is None else scenario
    grid = scenario.grid()
    for t in range(n_scenario):
        rng = np.random.default_rng([seed, 2, t])
        real = scenario.realize(seed, t, grid=grid)
        _check_instance(report, real.channels.H, grid, real.R, real.profile, rng, n_pairs, n_probe)
    return report
