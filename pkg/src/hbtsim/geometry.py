"""Two-beam layout: two point sources facing two detectors.

Internal units set c = 1 and the reference frequency to 1, so lengths are
quoted in units of c/f and times in 1/f.  Sources sit on the y axis at
+d/2 (source 0) and -d/2 (source 1); detectors sit on a parallel line a
distance x away, at ordinates y0 and y1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class Geometry:
    """Source/detector placement, lengths in c/f."""

    x: float          # distance from the source line to the detector line
    d: float          # centre-to-centre source separation
    y0: float = 0.0   # detector 0 ordinate
    y1: float = 0.0   # detector 1 ordinate

    def __post_init__(self):
        if self.x <= 0:
            raise ValueError("geometry.x must be positive")
        if self.d <= 0:
            raise ValueError("geometry.d must be positive")


def time_of_flight(m: int, n: int, geom: Geometry) -> float:
    """Travel time from source ``m`` to detector ``n`` (c = 1)."""
    yn = geom.y0 if n == 0 else geom.y1
    dy = (1 - 2 * m) * geom.d / 2.0 - yn
    return math.sqrt(geom.x * geom.x + dy * dy)


def tof_matrix(geom: Geometry) -> np.ndarray:
    """All four travel times as a 2x2 array indexed [source, detector]."""
    return np.array(
        [[time_of_flight(m, n, geom) for n in range(2)] for m in range(2)]
    )


def delta_t(geom: Geometry) -> float:
    """Four-path time combination that sets the fringe phase.

    (T00 - T10) - (T01 - T11); for small d, y relative to x this is close
    to d * (y1 - y0) / x.
    """
    return (time_of_flight(0, 0, geom) - time_of_flight(1, 0, geom)) - (
        time_of_flight(0, 1, geom) - time_of_flight(1, 1, geom)
    )


def fringe_period(geom: Geometry, frequency: float = 1.0) -> float:
    """Far-field fringe period in the swept detector ordinate."""
    return geom.x / (frequency * geom.d)
