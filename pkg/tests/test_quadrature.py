import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from capa.exceptions import AssumptionViolation
from capa.geometry import Aperture, UserLayout, WaveParams
from capa.quadrature import (
    ChannelMatrix,
    channel_gains,
    correlation_coefficient,
    correlation_matrix,
    inner_product,
    legendre_rule,
    sample_channels,
    tensor_grid,
)

WAVE = WaveParams()

# users at (1.5, -2, 20) and (-3, 1, 25) over the 0.5 m square; mpmath 2-D quadrature at 30 digits
TWO_USER_A1 = 1.739786065099255949295344
TWO_USER_R12 = -0.15005732479262940454 - 0.14673597687494286267j


def test_low_orders_are_the_textbook_rules():
    x, w = legendre_rule(1)
    assert np.array_equal(x, [0.0]) and np.array_equal(w, [2.0])
    x, w = legendre_rule(2)
    assert np.allclose(x, [-1 / np.sqrt(3), 1 / np.sqrt(3)], rtol=0, atol=1e-16)
    assert np.allclose(w, [1.0, 1.0], rtol=0, atol=1e-16)


def test_order_five_integrates_x8():
    x, w = legendre_rule(5)
    assert abs(np.sum(w * x**8) - 2 / 9) < 1e-14


@pytest.mark.parametrize("n", [1, 3, 6, 17, 30, 61])
def test_rule_exact_to_degree_2n_minus_1(n):
    x, w = legendre_rule(n)
    assert np.all(w > 0)
    assert np.allclose(x, -x[::-1], atol=1e-15)
    assert abs(w.sum() - 2) < 1e-13
    for deg in (2 * n - 2, 2 * n - 1):
        exact = 2 / (deg + 1) if deg % 2 == 0 else 0.0
        assert abs(np.sum(w * x**deg) - exact) < 1e-13


def test_newton_rule_matches_numpy_reference():
    for n in (6, 30, 64):
        x, w = legendre_rule(n)
        xr, wr = np.polynomial.legendre.leggauss(n)
        assert np.max(np.abs(x - xr)) < 1e-14 and np.max(np.abs(w - wr)) < 1e-14


def test_rule_rejects_zero_order_and_is_read_only():
    with pytest.raises(ValueError):
        legendre_rule(0)
    x, _ = legendre_rule(7)
    with pytest.raises(ValueError):
        x[0] = 1.0


def test_single_node_grid():
    g = tensor_grid(Aperture(0.5, 0.5), 1, 1)
    assert g.N == 1
    assert np.array_equal(g.nodes, [[0.0, 0.0, 0.0]]) and g.weights[0] == pytest.approx(0.25, rel=1e-15)


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 40), st.integers(1, 40), st.floats(0.05, 2.0), st.floats(0.05, 2.0))
def test_weights_sum_to_area(nx, ny, Lx, Ly):
    g = tensor_grid(Aperture(Lx, Ly), nx, ny)
    assert g.N == nx * ny
    assert np.all(g.weights > 0)
    assert g.weights.sum() == pytest.approx(Lx * Ly, rel=1e-13)


def test_x2y2_integral_on_3x3_grid():
    g = tensor_grid(Aperture(0.5, 0.3), 3, 3)
    x, y = g.nodes[:, 0], g.nodes[:, 1]
    assert abs(np.sum(g.weights * x**2 * y**2) - 2.34375e-05) < 1e-12


def test_inner_product_basic_properties(rng):
    g = tensor_grid(Aperture(0.5, 0.5), 6)
    ones = np.ones(g.N)
    assert inner_product(ones, ones, g) == pytest.approx(0.25, rel=1e-15)
    u = rng.standard_normal(g.N) + 1j * rng.standard_normal(g.N)
    v = rng.standard_normal(g.N) + 1j * rng.standard_normal(g.N)
    assert inner_product(u, v, g) == pytest.approx(np.conj(inner_product(v, u, g)), rel=1e-14)
    with pytest.raises(ValueError):
        inner_product(u[:-1], v, g)


def test_correlation_matrix_matches_high_precision_integrals():
    layout = UserLayout.isotropic([[1.5, -2.0, 20.0], [-3.0, 1.0, 25.0]], WAVE, 1.0, 1.0)
    R = correlation_matrix(sample_channels(layout, WAVE, tensor_grid(Aperture(0.5, 0.5), 30)))
    assert R[0, 0].real == pytest.approx(TWO_USER_A1, rel=1e-12)
    assert abs(R[0, 1] - TWO_USER_R12) / abs(TWO_USER_R12) < 1e-10
    assert R[1, 0] == np.conj(R[0, 1])


def test_self_inner_product_converges_under_refinement(draw, scenario):
    H = draw.channels.H
    fine = scenario.realize(1, 0, grid=tensor_grid(scenario.aperture, 60))
    for k in range(H.shape[0]):
        coarse = inner_product(H[k], H[k], draw.channels.grid).real
        assert abs(coarse - fine.R[k, k].real) / fine.R[k, k].real < 1e-8


def test_correlation_matrix_refinement_30_vs_60(draw, scenario):
    fine = scenario.realize(1, 0, grid=tensor_grid(scenario.aperture, 60)).R
    rel = np.max(np.abs(draw.R - fine) / np.abs(fine))
    assert rel < 1e-6


def test_correlation_matrix_structure(draw):
    R = draw.R
    assert np.array_equal(R, R.conj().T)
    a = channel_gains(R)
    assert np.all(a > 0)
    assert np.all(np.abs(R) ** 2 <= np.outer(a, a) * (1 + 1e-12))
    assert np.linalg.eigvalsh(R)[0] > 0


def test_single_user_and_disjoint_support():
    g = tensor_grid(Aperture(1.0, 1.0), 4)
    H = np.zeros((2, g.N), dtype=complex)
    H[0, : g.N // 2] = 1 + 1j
    H[1, g.N // 2 :] = 2.0
    R = correlation_matrix(ChannelMatrix(H, g))
    assert R[0, 1] == 0
    assert correlation_coefficient(R, 0, 1) == 0.0
    R1 = correlation_matrix(ChannelMatrix(H[:1], g))
    assert R1.shape == (1, 1) and R1[0, 0].imag == 0 and R1[0, 0].real > 0


def test_non_finite_samples_rejected():
    g = tensor_grid(Aperture(1.0, 1.0), 2)
    H = np.ones((1, g.N), dtype=complex)
    H[0, 0] = np.nan
    with pytest.raises(ValueError):
        correlation_matrix(ChannelMatrix(H, g))


def test_correlation_coefficient_edge_cases(draw):
    R = draw.R
    assert correlation_coefficient(R, 2, 2) == 1.0
    rho = correlation_coefficient(R, 0, 1)
    assert 0 <= rho < 1
    g = tensor_grid(Aperture(1.0, 1.0), 4)
    h = np.exp(1j * np.arange(g.N))
    Rp = correlation_matrix(ChannelMatrix(np.vstack([h, (2 - 3j) * h]), g))
    assert correlation_coefficient(Rp, 0, 1) == pytest.approx(1.0, abs=1e-12)
    with pytest.raises(AssumptionViolation):
        correlation_coefficient(np.zeros((2, 2)), 0, 1)
