"""Deterministic, splittable pseudo-random streams.

Every random draw in a simulation run comes from an :class:`RngStream`,
identified by a 64-bit seed and a label path such as
``"point12/d0/thresholds"``.  The underlying generator is counter-based
(Philox) and keyed by a hash of ``(seed, label)``, so

* the same ``(seed, label)`` always reproduces the same sequence,
* streams with distinct labels are statistically independent, and
* results never depend on the order in which streams are consumed,
  which makes sweep points safe to run in parallel.

Stream usage plan (fixed):

======================================  =======================================
label (relative to the run root)        purpose
======================================  =======================================
``point<i>/phases``                     per-block source phases (two per block)
``point<i>/routing``                    detector choice per emitted pair
``point<i>/freqs``                      pair frequencies (non-monochromatic)
``point<i>/d<n>/init``                  detector n register initialisation
``point<i>/d<n>/thresholds``            detector n click thresholds
``point<i>/d<n>/delays``                detector n click-delay draws
``efficiency/...``                      same roles for the efficiency run
======================================  =======================================
"""

from __future__ import annotations

import hashlib

import numpy as np


def _philox_key(seed: int, label: str) -> int:
    digest = hashlib.sha256(f"{seed}:{label}".encode()).digest()
    return int.from_bytes(digest[:16], "little")


class RngStream:
    """One independent random stream, addressed by (seed, label path).

    The stream is value-like: creating two streams with the same seed and
    label yields identical sequences, and splitting does not disturb the
    parent.  ``draws`` counts the values handed out so far.
    """

    __slots__ = ("seed", "label", "draws", "_gen")

    def __init__(self, seed: int, label: str = ""):
        self.seed = int(seed)
        self.label = label
        self.draws = 0
        self._gen: np.random.Generator | None = None

    def __repr__(self) -> str:
        return f"RngStream(seed={self.seed}, label={self.label!r}, draws={self.draws})"

    def split(self, label: str) -> "RngStream":
        """Derive an independent child stream; the parent is unaffected."""
        if not label:
            raise ValueError("stream label must be non-empty")
        path = f"{self.label}/{label}" if self.label else label
        return RngStream(self.seed, path)

    def _generator(self) -> np.random.Generator:
        if self._gen is None:
            self._gen = np.random.Generator(
                np.random.Philox(key=_philox_key(self.seed, self.label))
            )
        return self._gen

    def uniform(self) -> float:
        """One uniform draw in [0, 1)."""
        self.draws += 1
        return float(self._generator().random())

    def uniforms(self, n: int) -> np.ndarray:
        """``n`` uniform draws in [0, 1); identical to ``n`` single draws."""
        self.draws += int(n)
        return self._generator().random(int(n))

    def uniform_block(self, shape: tuple[int, ...]) -> np.ndarray:
        """Uniform draws filled in row-major order."""
        out = self._generator().random(shape)
        self.draws += out.size
        return out

    def normals(self, n: int, loc: float = 0.0, scale: float = 1.0) -> np.ndarray:
        self.draws += int(n)
        return self._generator().normal(loc, scale, int(n))

    def cauchys(self, n: int) -> np.ndarray:
        self.draws += int(n)
        return self._generator().standard_cauchy(int(n))
