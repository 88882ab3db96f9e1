"""Event-based single-photon detector with an adaptive learning stage.

The detector is a three-stage message processor:

* input stage: a simplex-constrained weight vector over K input ports is
  relaxed toward the port of the arriving messenger,
  ``w <- gamma * w + (1 - gamma) * e_port``, and the messenger's clock
  vector is stored in that port's register;
* transformation stage: the response is the weight-averaged sum of the
  stored registers, a two-component vector of length at most 1;
* output stage: the detector clicks when the squared response length
  exceeds a fresh uniform draw, so the click probability equals the
  squared response length.

An optional delay stage timestamps each click with the messenger's time
of flight plus an exponential variate whose mean shrinks rapidly as the
response approaches unit length.  Coincidence logic downstream compares
these timestamps.

The weight vector stays on the simplex analytically; no renormalisation
is performed and drift is only asserted in tests.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .messenger import TWO_PI, Message
from .rng import RngStream


@dataclass
class DetectorConfig:
    """Port count and memory parameter of the adaptive stage."""

    k: int = 2
    gamma: float = 0.99


@dataclass
class DelayConfig:
    """Click-delay model: mean T_max * (1 - |response|^2)^h."""

    enabled: bool = False
    t_max: float = 1000.0
    h: float = 8.0

    def __post_init__(self):
        if self.enabled and self.t_max <= 0:
            raise ValueError("delay.t_max must be positive when delay is enabled")
        if self.enabled and self.h <= 0:
            raise ValueError("delay.h must be positive when delay is enabled")


@dataclass
class ArrivalOutcome:
    """Result of processing one arrival: click flag, squared response,
    and the click timestamp when the delay stage is enabled."""

    click: int
    magnitude_sq: float
    delay: float | None = None


def threshold(magnitude_sq: float, stream: RngStream) -> int:
    """Click decision: 1 iff ``magnitude_sq`` exceeds a fresh uniform draw."""
    return 1 if magnitude_sq > stream.uniform() else 0


def delay_time(
    magnitude_sq: float, time_of_flight: float, cfg: DelayConfig, stream: RngStream
) -> float:
    """Click timestamp: flight time plus an exponential variate.

    The variate has mean t_max * (1 - magnitude_sq)^h and is sampled by
    inverse transform; the uniform draw is mapped to (0, 1] so the log is
    finite and the delay never undershoots the flight time.
    """
    r = 1.0 - stream.uniform()
    return time_of_flight - cfg.t_max * (1.0 - magnitude_sq) ** cfg.h * math.log(r)


class Detector:
    """Adaptive threshold detector with K input ports.

    State is owned by a single run and mutated in event order; the machine
    learns, so arrival order matters.
    """

    def __init__(self, n_ports: int, gamma: float, stream: RngStream):
        """Set the weight vector to (1, 0, ..., 0) and fill each register
        with an independent random unit vector."""
        if n_ports < 1:
            raise ValueError("detector needs at least one port")
        if not 0.0 <= gamma < 1.0:
            raise ValueError("detector gamma must lie in [0, 1)")
        self.n_ports = int(n_ports)
        self.gamma = float(gamma)
        self.weights = np.zeros(self.n_ports)
        self.weights[0] = 1.0
        angles = TWO_PI * stream.uniforms(self.n_ports)
        self.registers = np.column_stack([np.cos(angles), np.sin(angles)])

    def update(self, port: int, y: tuple[float, float]) -> None:
        """Input stage: relax the weights toward ``port`` and store ``y``.

        Every other register is left untouched.  ``y`` must be a unit
        vector (messenger clock).
        """
        if not 0 <= port < self.n_ports:
            raise ValueError(f"port {port} out of range for {self.n_ports} ports")
        self.weights *= self.gamma
        self.weights[port] += 1.0 - self.gamma
        self.registers[port, 0] = y[0]
        self.registers[port, 1] = y[1]

    def store_message(self, port: int, y: tuple[float, float]) -> None:
        """Write a register without touching the weights or clicking.

        Used when a message reaches the detector's input optics but the
        particle itself was routed elsewhere (see experiment delivery
        policy).
        """
        if not 0 <= port < self.n_ports:
            raise ValueError(f"port {port} out of range for {self.n_ports} ports")
        self.registers[port, 0] = y[0]
        self.registers[port, 1] = y[1]

    def response(self) -> tuple[float, float]:
        """Transformation stage: weight-averaged sum of the registers.

        Accumulated in port order so results are bit-identical to the
        compiled event loop.
        """
        tx = 0.0
        ty = 0.0
        for j in range(self.n_ports):
            tx += self.weights[j] * self.registers[j, 0]
            ty += self.weights[j] * self.registers[j, 1]
        return (tx, ty)

    def process_arrival(
        self,
        port: int,
        message: Message,
        delay_cfg: DelayConfig,
        threshold_stream: RngStream,
        delay_stream: RngStream,
    ) -> ArrivalOutcome:
        """Full pipeline for one arriving messenger.

        The message's time of flight must already be set.  Updates the
        adaptive stage, evaluates the response, draws the click, and
        timestamps it when the delay stage is enabled.
        """
        self.update(port, message.vector())
        tx, ty = self.response()
        magnitude_sq = tx * tx + ty * ty
        click = threshold(magnitude_sq, threshold_stream)
        delay = None
        if click and delay_cfg.enabled:
            delay = delay_time(
                magnitude_sq, message.time_of_flight, delay_cfg, delay_stream
            )
        return ArrivalOutcome(click=click, magnitude_sq=magnitude_sq, delay=delay)

    def dump(self) -> str:
        """Diagnostic text record of the machine state."""
        lines = [f"gamma={self.gamma:.17g} ports={self.n_ports}"]
        lines.append("weights " + " ".join(f"{w:.17g}" for w in self.weights))
        for j in range(self.n_ports):
            lines.append(
                f"register[{j}] {self.registers[j, 0]:.17g} {self.registers[j, 1]:.17g}"
            )
        return "\n".join(lines)
