"""Closed-form reference curves and their Monte Carlo cross-checks."""

import math
from dataclasses import replace

import numpy as np
import pytest

from hbtsim.geometry import Geometry, delta_t
from hbtsim.oracle import (
    WaveParams,
    intensity,
    intensity_correlation,
    predicted_coincidence,
    visibility,
)

GEOM = Geometry(x=100000.0, d=2000.0)
TWO_PI = 2.0 * math.pi


def test_intensity_constructive_maximum():
    # equal phases and a symmetric detector: both paths in phase
    params = WaveParams(amplitude=1.5, phi0=0.7, phi1=0.7)
    assert abs(intensity(0, params, GEOM) - 4.0 * 1.5**2) < 1e-9


def test_intensity_destructive_minimum():
    params = WaveParams(amplitude=1.0, phi0=math.pi, phi1=0.0)
    assert abs(intensity(0, params, GEOM)) < 1e-9


def test_intensity_range():
    rng = np.random.default_rng(1)
    params = WaveParams(phi0=rng.uniform(0, TWO_PI, 1000), phi1=rng.uniform(0, TWO_PI, 1000))
    values = intensity(1, params, replace(GEOM, y1=13.0))
    assert values.min() >= 0.0
    assert values.max() <= 4.0 + 1e-12


def test_phase_average_kills_first_order_fringes():
    rng = np.random.default_rng(2)
    params = WaveParams(
        amplitude=1.0,
        phi0=rng.uniform(0, TWO_PI, 200_000),
        phi1=rng.uniform(0, TWO_PI, 200_000),
    )
    mean = intensity(1, params, replace(GEOM, y1=37.0)).mean()
    assert abs(mean - 2.0) < 0.01 * 2.0


def test_correlation_hand_values():
    assert abs(intensity_correlation(0.0, 1.0, 1.0, "classical") - 6.0) < 1e-12
    assert abs(intensity_correlation(0.5, 1.0, 1.0, "classical") - 2.0) < 1e-9
    assert abs(intensity_correlation(0.5, 1.0, 1.0, "boson")) < 1e-9


def test_correlation_amplitude_scaling():
    assert abs(intensity_correlation(0.0, 1.0, 2.0, "classical") - 6.0 * 16) < 1e-9


def test_phase_average_of_intensity_product_matches_closed_form():
    rng = np.random.default_rng(3)
    geom = replace(GEOM, y1=13.0)
    params = WaveParams(
        phi0=rng.uniform(0, TWO_PI, 200_000), phi1=rng.uniform(0, TWO_PI, 200_000)
    )
    product = (intensity(0, params, geom) * intensity(1, params, geom)).mean()
    expected = intensity_correlation(delta_t(geom), 1.0, 1.0, "classical")
    assert abs(product - expected) < 0.01 * expected


def test_predicted_coincidence_simple_peak():
    assert predicted_coincidence(2_000_000, 0.0) == pytest.approx(375_000.0)


def test_predicted_coincidence_simple_visibility_is_half():
    dt = np.linspace(-1.0, 1.0, 2001)
    curve = predicted_coincidence(1_000_000, dt)
    assert abs(visibility(curve) - 0.5) < 1e-9


def test_predicted_coincidence_with_fit_constants():
    value = predicted_coincidence(
        2_000_000, 0.5, mode="delay", fit=(0.077, 0.974)
    )
    assert value == pytest.approx(0.077 * 2_000_000 * (1.0 - 0.974), rel=1e-6)


def test_windowed_modes_require_fit_constants():
    with pytest.raises(ValueError):
        predicted_coincidence(1000, 0.0, mode="delay")
    with pytest.raises(ValueError):
        predicted_coincidence(1000, 0.0, mode="boson")


def test_unknown_modes_rejected():
    with pytest.raises(ValueError):
        predicted_coincidence(1000, 0.0, mode="classical")
    with pytest.raises(ValueError):
        intensity_correlation(0.0, 1.0, 1.0, "simple")


def test_visibility_half_contrast_curve():
    theta = np.linspace(0.0, 1.0, 2001)
    assert abs(visibility(1.0 + 0.5 * np.cos(TWO_PI * theta)) - 0.5) < 1e-9


def test_visibility_full_contrast_curve():
    theta = np.linspace(0.0, 1.0, 2001)
    assert abs(visibility(1.0 + np.cos(TWO_PI * theta)) - 1.0) < 1e-9


def test_visibility_flat_signal_is_zero():
    assert visibility(np.full(10, 3.7)) == 0.0


def test_visibility_undefined_cases():
    with pytest.raises(ValueError):
        visibility(np.zeros(5))
    with pytest.raises(ValueError):
        visibility([])


def test_nonpositive_amplitude_rejected():
    with pytest.raises(ValueError):
        WaveParams(amplitude=0.0)
