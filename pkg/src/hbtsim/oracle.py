"""Closed-form wave-theory and model predictions.

These expressions serve as the analytic reference for the event
simulation: single-detector intensity for two interfering sources,
phase-averaged intensity products (classical and boson statistics), the
predicted coincidence curves, and fringe visibility.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .geometry import Geometry, time_of_flight
from .messenger import TWO_PI


@dataclass
class WaveParams:
    """Amplitude, frequency and the two source phases.

    Phases may be numpy arrays; the intensity broadcasts, which is how the
    Monte Carlo phase-average checks sample it.
    """

    amplitude: float = 1.0
    frequency: float = 1.0
    phi0: float | np.ndarray = 0.0
    phi1: float | np.ndarray = 0.0

    def __post_init__(self):
        if self.amplitude <= 0:
            raise ValueError("amplitude must be positive")


def intensity(n: int, params: WaveParams, geom: Geometry):
    """Intensity at detector ``n`` for fixed source phases.

    2 A^2 (1 + cos(phi0 - phi1 + 2 pi f (T0n - T1n))), in [0, 4 A^2].
    """
    dt = time_of_flight(0, n, geom) - time_of_flight(1, n, geom)
    arg = params.phi0 - params.phi1 + TWO_PI * params.frequency * dt
    return 2.0 * params.amplitude**2 * (1.0 + np.cos(arg))


def intensity_correlation(delta_t, frequency: float, amplitude: float, mode: str):
    """Phase-averaged product of the two detector intensities.

    Classical (independent random phases): 4 A^4 (1 + cos(2 pi f dT) / 2),
    fringe contrast 1/2.  Boson statistics: 4 A^4 (1 + cos(2 pi f dT)),
    full contrast.
    """
    c = np.cos(TWO_PI * frequency * np.asarray(delta_t, dtype=float))
    if mode == "classical":
        out = 4.0 * amplitude**4 * (1.0 + 0.5 * c)
    elif mode == "boson":
        out = 4.0 * amplitude**4 * (1.0 + c)
    else:
        raise ValueError(f"unknown correlation mode {mode!r}")
    return out if out.ndim else float(out)


def predicted_coincidence(
    n_tot: int,
    delta_t,
    frequency: float = 1.0,
    mode: str = "simple",
    fit: tuple[float, float] | None = None,
):
    """Predicted coincidence count at path-time difference ``delta_t``.

    ``simple`` has the closed form n_tot/8 * (1 + cos(2 pi f dT)/2).  The
    windowed-delay and boson variants have no analytic prefactor; their
    curve is a * n_tot * (1 + b * cos(2 pi f dT)) with fitted ``(a, b)``,
    which must be supplied.
    """
    c = np.cos(TWO_PI * frequency * np.asarray(delta_t, dtype=float))
    if mode == "simple":
        out = n_tot / 8.0 * (1.0 + 0.5 * c)
    elif mode in ("delay", "boson"):
        if fit is None:
            raise ValueError(f"mode {mode!r} needs fitted (a, b) constants")
        a, b = fit
        out = a * n_tot * (1.0 + b * c)
    else:
        raise ValueError(f"unknown coincidence mode {mode!r}")
    return out if out.ndim else float(out)


def visibility(samples) -> float:
    """Fringe contrast (max - min) / (max + min) of a sampled signal."""
    arr = np.asarray(samples, dtype=float)
    if arr.size == 0:
        raise ValueError("visibility of an empty signal is undefined")
    hi = float(arr.max())
    lo = float(arr.min())
    if hi + lo == 0.0:
        raise ValueError("visibility of an all-zero signal is undefined")
    return (hi - lo) / (hi + lo)
