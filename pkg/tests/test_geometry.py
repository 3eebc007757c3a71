import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from capa.exceptions import ConfigError, SingularityError
from capa.geometry import (
    SPEED_OF_LIGHT,
    Aperture,
    UserLayout,
    UserRegion,
    WaveParams,
    channel_samples,
    effective_channel,
    sample_user_positions,
    spatial_response,
)

WAVE = WaveParams()

# k0 * eta / (4 pi * 15) at 2.4 GHz with exact c, 40-digit mpmath evaluation
ABS_G_AT_15M = 100.6005610536807269822691


def test_wavelength_uses_exact_speed_of_light():
    assert SPEED_OF_LIGHT == 299_792_458.0
    assert WAVE.wavelength == pytest.approx(0.12491352416666666667, rel=1e-15)


def test_response_magnitude_at_15m_matches_high_precision_value():
    g = spatial_response(np.zeros(3), np.array([0.0, 0.0, 15.0]), WAVE)
    assert abs(g) == pytest.approx(ABS_G_AT_15M, rel=1e-14)


@pytest.mark.parametrize("m", [1, 7, 120])
def test_phase_is_minus_quarter_turn_at_whole_wavelengths(m):
    g = spatial_response(np.zeros(3), np.array([0.0, 0.0, m * WAVE.wavelength]), WAVE)
    assert np.angle(g) == pytest.approx(-np.pi / 2, abs=1e-9)


def test_response_is_symmetric_in_its_arguments():
    r, s = np.array([0.1, -0.2, 0.0]), np.array([3.0, 1.0, 20.0])
    assert spatial_response(r, s, WAVE) == spatial_response(s, r, WAVE)


def test_coincident_points_raise():
    with pytest.raises(SingularityError):
        spatial_response(np.ones(3), np.ones(3), WAVE)


def test_isotropic_effective_channel_scales_by_half_wavelength_over_sqrt_pi():
    layout = UserLayout.isotropic([[1.0, 2.0, 20.0]], WAVE, 1.0, 1.0)
    r = np.array([0.1, 0.1, 0.0])
    h = effective_channel(r, 0, layout, WAVE)
    g = spatial_response(r, layout.positions[0], WAVE)
    assert abs(h) == pytest.approx(abs(g) * WAVE.wavelength / (2 * np.sqrt(np.pi)), rel=1e-14)


def test_unit_area_channel_equals_response():
    layout = UserLayout([[1.0, 2.0, 20.0]], 1.0, 1.0, 1.0)
    r = np.array([0.1, 0.1, 0.0])
    assert effective_channel(r, 0, layout, WAVE) == spatial_response(r, layout.positions[0], WAVE)


def test_effective_channel_rejects_bad_index():
    layout = UserLayout([[1.0, 2.0, 20.0]], 1.0, 1.0, 1.0)
    with pytest.raises(IndexError):
        effective_channel(np.zeros(3), 1, layout, WAVE)


@settings(max_examples=50, deadline=None)
@given(
    st.tuples(st.floats(-5, 5), st.floats(-5, 5), st.floats(15, 30)),
    st.tuples(st.floats(-0.25, 0.25), st.floats(-0.25, 0.25)),
    st.tuples(st.floats(-0.25, 0.25), st.floats(-0.25, 0.25)),
)
def test_inverse_distance_law_and_phase(s, p1, p2):
    layout = UserLayout([s], WAVE.isotropic_area, 1.0, 1.0)
    r1, r2 = np.array([*p1, 0.0]), np.array([*p2, 0.0])
    d1, d2 = np.linalg.norm(r1 - s), np.linalg.norm(r2 - s)
    h1, h2 = (effective_channel(r, 0, layout, WAVE) for r in (r1, r2))
    assert abs(h1) / abs(h2) == pytest.approx(d2 / d1, rel=1e-12)
    phase = np.angle(h1) + WAVE.wavenumber * d1 + np.pi / 2
    assert np.angle(np.exp(1j * phase)) == pytest.approx(0.0, abs=1e-8)


def test_channel_samples_match_pointwise_evaluation():
    layout = UserLayout.isotropic([[1.0, 2.0, 20.0], [-3.0, 0.5, 17.0]], WAVE, 1.0, 1.0)
    pts = np.array([[0.0, 0.0, 0.0], [0.2, -0.1, 0.0]])
    H = channel_samples(pts, layout, WAVE)
    for k in range(2):
        for n in range(2):
            assert H[k, n] == pytest.approx(effective_channel(pts[n], k, layout, WAVE), rel=1e-15)


def test_positions_are_deterministic_and_nested():
    region = UserRegion()
    a = sample_user_positions(7, 3, 8, region)
    b = sample_user_positions(7, 3, 8, region)
    assert np.array_equal(a, b)
    assert np.array_equal(sample_user_positions(7, 3, 3, region), a[:3])
    assert not np.array_equal(sample_user_positions(7, 4, 8, region), a)


def test_degenerate_height_interval_is_exact():
    pos = sample_user_positions(0, 0, 50, UserRegion(5, 5, 20, 20))
    assert np.all(pos[:, 2] == 20.0)


def test_position_means_within_three_standard_errors():
    region = UserRegion()
    pos = sample_user_positions(2024, 0, 10_000, region)
    se = np.array([10, 10, 15]) / np.sqrt(12) / np.sqrt(10_000)
    assert np.all(np.abs(pos.mean(axis=0) - [0.0, 0.0, 22.5]) < 3 * se)
    assert np.all(np.abs(pos[:, 0]) <= 5) and np.all((pos[:, 2] >= 15) & (pos[:, 2] <= 30))


@pytest.mark.parametrize(
    "factory",
    [
        lambda: Aperture(0.0, 1.0),
        lambda: UserRegion(5, 5, 30, 15),
        lambda: UserRegion(0, 5, 15, 30),
        lambda: WaveParams(frequency=-1.0),
        lambda: UserLayout([[0, 0, 1], [0, 0, 1]], 1.0, 1.0, 1.0),
        lambda: UserLayout([[0, 0, 1]], 1.0, 0.0, 1.0),
        lambda: UserLayout([[0, 0, 1]], 1.0, 1.0, 0.0),
        lambda: sample_user_positions(0, 0, 0, UserRegion()),
    ],
)
def test_invalid_inputs_raise_config_error(factory):
    with pytest.raises(ConfigError):
        factory()
