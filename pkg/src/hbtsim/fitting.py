"""Least-squares fringe fits and visibility extraction for sweep data.

The coincidence model a * n_tot * (1 + b * cos(2 pi f dT)) is linear in
(p, q) = (a, a*b), so the fit is solved exactly from the 2x2 normal
equations; there is no iterative optimiser to tune.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .messenger import TWO_PI
from .oracle import visibility


class FitError(ValueError):
    """Raised for degenerate designs or unphysical fitted amplitudes."""


@dataclass
class FitResult:
    """Fitted fringe: amplitude fraction ``a``, contrast ``b``, residual
    2-norm in counts, and the fit-implied visibility |b|."""

    a: float
    b: float
    residual_norm: float
    visibility: float


def fit_cosine(delta_t, counts, n_tot: int, frequency: float = 1.0) -> FitResult:
    """Fit counts_i ~ a * n_tot * (1 + b * cos(2 pi f dT_i)).

    Exact closed-form least squares via the normal equations in
    (p, q) = (a, a*b).  Raises :class:`FitError` when the cosine values do
    not vary (singular design) or the fitted amplitude is not positive.
    """
    dt = np.asarray(delta_t, dtype=float)
    y = np.asarray(counts, dtype=float) / float(n_tot)
    if dt.shape != y.shape or dt.ndim != 1:
        raise ValueError("delta_t and counts must be 1-d arrays of equal length")
    if dt.size < 3:
        raise FitError("need at least three points to fit the fringe")
    c = np.cos(TWO_PI * frequency * dt)
    s00 = float(dt.size)
    s01 = float(c.sum())
    s11 = float((c * c).sum())
    det = s00 * s11 - s01 * s01
    if det <= 1e-12 * s00 * s11:
        raise FitError("degenerate design: cosine values do not vary across points")
    r0 = float(y.sum())
    r1 = float((y * c).sum())
    p = (s11 * r0 - s01 * r1) / det
    q = (s00 * r1 - s01 * r0) / det
    if p <= 0.0:
        raise FitError(f"unphysical fitted amplitude a = {p:.3g}")
    residual = float(n_tot) * (y - (p + q * c))
    return FitResult(
        a=p,
        b=q / p,
        residual_norm=math.sqrt(float((residual * residual).sum())),
        visibility=abs(q / p),
    )


def fit_constant(counts, n_tot: int) -> float:
    """Flat fit of single-detector counts: mean(count) / n_tot."""
    y = np.asarray(counts, dtype=float)
    if y.size == 0:
        raise FitError("cannot fit an empty point set")
    return float(y.mean()) / float(n_tot)


def empirical_visibility(counts) -> float:
    """Fringe contrast of the raw counts, (max - min) / (max + min)."""
    return visibility(counts)


def analyze_sweep(result) -> None:
    """Fill a SweepResult's fit fields in place.

    Runs the cosine fit on the coincidence counts, flat fits on each
    detector's singles, and the empirical visibility of the coincidences.
    """
    dt = [p.delta_t for p in result.points]
    coinc = [p.n_coincidence for p in result.points]
    n_tot = result.config.n_tot
    result.coincidence_fit = fit_cosine(dt, coinc, n_tot)
    result.singles_a = (
        fit_constant([p.n_count0 for p in result.points], n_tot),
        fit_constant([p.n_count1 for p in result.points], n_tot),
    )
    result.visibility = empirical_visibility(coinc)
