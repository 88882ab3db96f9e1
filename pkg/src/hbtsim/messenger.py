"""Messenger pairs: phases, frequencies and detector routing.

Each emitted particle is a messenger carrying a clock message, the unit
vector (cos psi, sin psi) with psi = 2*pi*f*t + delta, where t is the
accumulated time of flight and delta a phase offset.  A source event
emits one messenger from each source; pseudo-random draws decide which
detector each messenger travels to.  Phase offsets are redrawn in blocks:
one pair of offsets is held for ``n_f`` successive emissions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .rng import RngStream

TWO_PI = 2.0 * math.pi

ROUTING_INDEPENDENT = "independent"
ROUTING_EXCLUSIVE = "boson"


@dataclass
class Message:
    """A particle's clock: frequency, phase offset, accumulated flight time."""

    frequency: float
    phase: float
    time_of_flight: float = 0.0

    def vector(self) -> tuple[float, float]:
        """Clock hand (cos psi, sin psi), psi = 2*pi*f*t + phase.

        The whole turns of f*t are removed before multiplying by 2*pi,
        which keeps full precision for flight times of many periods.
        """
        theta = TWO_PI * ((self.frequency * self.time_of_flight) % 1.0) + self.phase
        return (math.cos(theta), math.sin(theta))


@dataclass
class SourceConfig:
    """Source behaviour: phase blocks and the pair frequency rule.

    ``mode``            "block-random" redraws the two phase offsets every
                        ``n_f`` pairs; "fixed-phase" draws them once per run.
    ``frequency_mode``  "monochromatic" gives every messenger ``frequency``;
                        "pair-conserving" draws f1 from a distribution centred
                        on ``pump``/2 and sets f2 = pump - f1.
    ``width``           Gaussian standard deviation, or Lorentzian half width
                        at half maximum, of the f1 draw.
    """

    mode: str = "block-random"
    n_f: int = 50
    frequency_mode: str = "monochromatic"
    frequency: float = 1.0
    pump: float = 2.0
    dist: str = "gaussian"
    width: float = 0.02


@dataclass
class PairEmission:
    """One emitted pair, already routed."""

    message0: Message
    message1: Message
    target0: int
    target1: int


def draw_phase_block(stream: RngStream) -> tuple[float, float]:
    """Draw the two phase offsets for the next block, uniform on [0, 2*pi)."""
    u = stream.uniforms(2)
    return (TWO_PI * float(u[0]), TWO_PI * float(u[1]))


def phase_blocks(stream: RngStream, n_blocks: int) -> np.ndarray:
    """Phase offsets for ``n_blocks`` blocks, shape (n_blocks, 2).

    Row ``b`` equals the b-th call of :func:`draw_phase_block` on the same
    stream.
    """
    return TWO_PI * stream.uniform_block((n_blocks, 2))


def route_pair(mode: str, stream: RngStream) -> tuple[int, int]:
    """Detector targets for one pair.

    Independent routing sends each messenger to detector 0 or 1 with equal
    probability; exclusive ("boson") routing picks (0, 1) or (1, 0) so the
    two messengers never share a detector.
    """
    return tuple(route_pairs(mode, stream, 1)[0])


def route_pairs(mode: str, stream: RngStream, n: int) -> np.ndarray:
    """Targets for ``n`` pairs, shape (n, 2) of int8."""
    if mode == ROUTING_INDEPENDENT:
        return (stream.uniform_block((n, 2)) >= 0.5).astype(np.int8)
    if mode == ROUTING_EXCLUSIVE:
        targets = np.empty((n, 2), np.int8)
        targets[:, 0] = stream.uniforms(n) >= 0.5
        targets[:, 1] = 1 - targets[:, 0]
        return targets
    raise ValueError(f"unknown routing mode {mode!r}")


def draw_frequencies(config: SourceConfig, stream: RngStream) -> tuple[float, float]:
    """One pair-conserving frequency draw (f1, f2) with f1 + f2 = pump.

    Draws outside (0, pump) are rejected and redrawn so both members stay
    positive.
    """
    if config.pump <= 0:
        raise ValueError("pump frequency must be positive")
    while True:
        if config.dist == "gaussian":
            f1 = float(stream.normals(1, loc=config.pump / 2.0, scale=config.width)[0])
        elif config.dist == "lorentzian":
            f1 = config.pump / 2.0 + config.width * float(stream.cauchys(1)[0])
        else:
            raise ValueError(f"unknown frequency distribution {config.dist!r}")
        if 0.0 < f1 < config.pump:
            return (f1, config.pump - f1)


def source_frequencies(
    config: SourceConfig, stream: RngStream, n: int
) -> tuple[np.ndarray, np.ndarray]:
    """Frequencies carried by the two messengers of each of ``n`` pairs.

    Monochromatic mode fills both arrays with the fixed frequency.  In
    pair-conserving mode f1 is drawn in a batch (rejected values redrawn),
    and a final fair draw per pair decides which member leaves source 0.
    """
    if config.frequency_mode == "monochromatic":
        f = np.full(n, config.frequency)
        return f, f.copy()
    if config.pump <= 0:
        raise ValueError("pump frequency must be positive")
    if config.dist == "gaussian":
        f1 = stream.normals(n, loc=config.pump / 2.0, scale=config.width)
    elif config.dist == "lorentzian":
        f1 = config.pump / 2.0 + config.width * stream.cauchys(n)
    else:
        raise ValueError(f"unknown frequency distribution {config.dist!r}")
    bad = (f1 <= 0.0) | (f1 >= config.pump)
    while bad.any():
        k = int(bad.sum())
        if config.dist == "gaussian":
            f1[bad] = stream.normals(k, loc=config.pump / 2.0, scale=config.width)
        else:
            f1[bad] = config.pump / 2.0 + config.width * stream.cauchys(k)
        bad = (f1 <= 0.0) | (f1 >= config.pump)
    f2 = config.pump - f1
    swap = stream.uniforms(n) >= 0.5
    from_s0 = np.where(swap, f2, f1)
    from_s1 = np.where(swap, f1, f2)
    return from_s0, from_s1
