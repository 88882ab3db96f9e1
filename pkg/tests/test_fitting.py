"""Closed-form fringe fit: exact recovery, equivariance, error cases."""

import math

import numpy as np
import pytest

from hbtsim.config import default_config
from hbtsim.experiment import PointCounts, SweepResult
from hbtsim.fitting import (
    FitError,
    analyze_sweep,
    empirical_visibility,
    fit_constant,
    fit_cosine,
)

TWO_PI = 2.0 * math.pi


def synthetic_counts(a, b, n_tot, dt):
    return a * n_tot * (1.0 + b * np.cos(TWO_PI * dt))


def test_exact_recovery_of_generating_model():
    dt = np.linspace(-2.0, 2.0, 41)
    counts = synthetic_counts(0.125, 0.5, 2_000_000, dt)
    fit = fit_cosine(dt, counts, 2_000_000)
    assert abs(fit.a - 0.125) < 1e-10
    assert abs(fit.b - 0.5) < 1e-10
    assert fit.residual_norm < 1e-6
    assert fit.visibility == abs(fit.b)


def test_scale_equivariance():
    dt = np.linspace(-1.0, 1.0, 21)
    counts = synthetic_counts(0.08, 0.9, 1_000_000, dt)
    base = fit_cosine(dt, counts, 1_000_000)
    scaled = fit_cosine(dt, counts * 7.0, 7_000_000)
    assert base.a == pytest.approx(scaled.a, abs=1e-12)
    assert base.b == pytest.approx(scaled.b, abs=1e-12)


def test_fit_contrast_equals_empirical_visibility_on_dense_data():
    dt = np.linspace(-2.0, 2.0, 1601)
    counts = synthetic_counts(0.077, 0.974, 1_000_000, dt)
    fit = fit_cosine(dt, counts, 1_000_000)
    assert abs(abs(fit.b) - empirical_visibility(counts)) < 1e-6


def test_noise_does_not_bias_the_fit_badly():
    rng = np.random.default_rng(11)
    dt = np.linspace(-2.0, 2.0, 41)
    clean = synthetic_counts(0.125, 0.5, 2_000_000, dt)
    noisy = clean + rng.normal(0.0, np.sqrt(clean))
    fit = fit_cosine(dt, noisy, 2_000_000)
    assert abs(fit.a - 0.125) < 0.001
    assert abs(fit.b - 0.5) < 0.005


def test_degenerate_design_rejected():
    dt = np.zeros(10)
    with pytest.raises(FitError):
        fit_cosine(dt, np.ones(10), 1000)


def test_unphysical_amplitude_rejected():
    dt = np.linspace(-1.0, 1.0, 11)
    with pytest.raises(FitError):
        fit_cosine(dt, np.zeros(11), 1000)


def test_too_few_points_rejected():
    with pytest.raises(FitError):
        fit_cosine(np.array([0.0, 0.5]), np.array([1.0, 2.0]), 10)


def test_fit_constant_is_the_mean_fraction():
    counts = np.array([10.0, 20.0, 30.0])
    assert fit_constant(counts, 100) == pytest.approx(0.2)
    assert fit_constant(np.full(7, 0.31 * 1000), 1000) == pytest.approx(0.31)


def test_fit_constant_empty_rejected():
    with pytest.raises(FitError):
        fit_constant([], 100)


def test_empirical_visibility_cases():
    assert empirical_visibility([5.0, 5.0, 5.0]) == 0.0
    assert empirical_visibility([1.0, 3.0]) == pytest.approx(0.5)
    with pytest.raises(ValueError):
        empirical_visibility([0.0, 0.0])


def test_analyze_sweep_fills_fit_fields():
    config = default_config()
    dt = np.linspace(-2.0, 2.0, 41)
    coinc = synthetic_counts(0.125, 0.5, config.n_tot, dt)
    points = [
        PointCounts(
            y1=float(i),
            delta_t=float(dt[i]),
            n_count0=config.n_tot // 2,
            n_count1=config.n_tot // 2,
            n_coincidence=int(coinc[i]),
        )
        for i in range(len(dt))
    ]
    result = SweepResult(points=points, config=config)
    analyze_sweep(result)
    assert result.coincidence_fit.a == pytest.approx(0.125, abs=1e-6)
    assert result.coincidence_fit.b == pytest.approx(0.5, abs=1e-5)
    assert result.singles_a == (0.5, 0.5)
    assert result.visibility == pytest.approx(0.5, abs=1e-4)
