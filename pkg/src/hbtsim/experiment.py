"""Experiment orchestration: pair events, sweep points, full sweeps.

A run emits ``n_tot`` messenger pairs per sweep point.  Each pair is
routed, flown to its detectors, and processed by the adaptive detector
machines; coincidences are counted per pair event, either directly (both
detectors clicked) or through the click-timestamp window.

Message delivery policy (``reach``): the two source beams overlap at the
detection line, so by default every emission's clock message is written
into both detectors' input registers ("both"), while the particle itself,
the thing that can produce a click, only arrives at its routed detector.
With ``reach = "target"`` the message accompanies the particle only; the
fringe then loses a few percent of contrast to register turnover at
phase-block boundaries.

Every sweep point owns random substreams derived from (seed, point
index), so results are independent of execution order and sweep points
can run on a thread pool.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import TYPE_CHECKING

import numpy as np

from . import kernels
from .detector import Detector, DetectorConfig, DelayConfig
from .geometry import Geometry, delta_t, time_of_flight, tof_matrix
from .messenger import (
    ROUTING_EXCLUSIVE,
    ROUTING_INDEPENDENT,
    Message,
    PairEmission,
    SourceConfig,
    phase_blocks,
    route_pairs,
    source_frequencies,
)
from .rng import RngStream

if TYPE_CHECKING:
    from .fitting import FitResult

MODES = ("hbt", "hbt-delay", "boson", "efficiency", "nonmono")

REACH_BOTH = "both"
REACH_TARGET = "target"


def routing_for(mode: str) -> str:
    """Routing rule per mode: boson-like modes never share a detector."""
    return ROUTING_EXCLUSIVE if mode in ("boson", "nonmono") else ROUTING_INDEPENDENT


def windowed_for(mode: str) -> bool:
    """Whether coincidences compare click timestamps against the window."""
    return mode in ("hbt-delay", "boson", "nonmono")


@dataclass
class SweepConfig:
    """Swept detector-1 ordinates, in c/f."""

    y1_min: float = -100.0
    y1_max: float = 100.0
    steps: int = 41


@dataclass
class EfficiencyConfig:
    """Constant-message detection run: discarded warm-up, counted arrivals."""

    warmup: int = 1000
    arrivals: int = 10000


@dataclass
class ExperimentConfig:
    """Complete description of one reproducible run."""

    mode: str = "hbt"
    n_tot: int = 2_000_000
    window: float = 1.0
    seed: int = 12345
    reach: str = REACH_BOTH
    source: SourceConfig = field(default_factory=SourceConfig)
    detector: DetectorConfig = field(default_factory=DetectorConfig)
    delay: DelayConfig = field(default_factory=DelayConfig)
    geometry: Geometry = field(default_factory=lambda: Geometry(x=100000.0, d=2000.0))
    sweep: SweepConfig = field(default_factory=SweepConfig)
    efficiency: EfficiencyConfig = field(default_factory=EfficiencyConfig)


@dataclass
class PairEvent:
    """Outcome of one emitted pair: per-detector click counts, click
    timestamps (delay stage only), and the coincidence flag."""

    clicks: tuple[int, int]
    delays: tuple[list[float], list[float]]
    coincident: bool


@dataclass
class PointCounts:
    """Accumulated counts for one sweep point."""

    y1: float
    delta_t: float
    n_count0: int
    n_count1: int
    n_coincidence: int


@dataclass
class SweepResult:
    """Ordered per-point counts plus the config echo; fit fields are
    filled by the analysis module."""

    points: list[PointCounts]
    config: ExperimentConfig
    coincidence_fit: "FitResult | None" = None
    singles_a: tuple[float, float] | None = None
    visibility: float | None = None


def run_pair_event(
    config: ExperimentConfig,
    geom: Geometry,
    detectors: list[Detector],
    emission: PairEmission,
    threshold_streams: list[RngStream],
    delay_streams: list[RngStream],
) -> PairEvent:
    """Process one routed pair through both detectors; mutates them.

    Flight times are written into each message before processing.  The
    messengers are handled in source order.  A coincidence requires a
    click at both detectors within this event; with the delay stage it
    additionally requires two click timestamps within the window, counted
    at most once per event.
    """
    broadcast = config.reach == REACH_BOTH
    windowed = windowed_for(config.mode)
    clicks = [0, 0]
    stamps: tuple[list[float], list[float]] = ([], [])
    pairs = ((0, emission.message0, emission.target0),
             (1, emission.message1, emission.target1))
    for m, message, target in pairs:
        if broadcast:
            other = 1 - target
            flown = replace(message, time_of_flight=time_of_flight(m, other, geom))
            detectors[other].store_message(m, flown.vector())
        flown = replace(message, time_of_flight=time_of_flight(m, target, geom))
        outcome = detectors[target].process_arrival(
            m, flown, config.delay, threshold_streams[target], delay_streams[target]
        )
        if outcome.click:
            clicks[target] += 1
            if outcome.delay is not None:
                stamps[target].append(outcome.delay)
    if clicks[0] > 0 and clicks[1] > 0:
        if windowed:
            coincident = any(
                abs(a - b) <= config.window for a in stamps[0] for b in stamps[1]
            )
        else:
            coincident = True
    else:
        coincident = False
    return PairEvent(clicks=(clicks[0], clicks[1]), delays=stamps, coincident=coincident)


def _point_inputs(config: ExperimentConfig, stream: RngStream):
    """Pre-draw the emission data for one point from its role substreams."""
    n_tot = config.n_tot
    n_f = config.source.n_f if config.source.mode == "block-random" else max(n_tot, 1)
    n_blocks = -(-n_tot // n_f) if n_tot else 0
    phases = phase_blocks(stream.split("phases"), n_blocks)
    targets = route_pairs(routing_for(config.mode), stream.split("routing"), n_tot)
    f_s0, f_s1 = source_frequencies(config.source, stream.split("freqs"), n_tot)
    return n_f, phases, targets, f_s0, f_s1


def run_point(
    config: ExperimentConfig,
    y1: float,
    stream: RngStream,
    use_kernel: bool = True,
) -> PointCounts:
    """Run ``n_tot`` pair events at one detector-1 ordinate.

    Detector states are fresh for every point.  The compiled kernel and
    the pure-Python event path consume identical random substreams and
    produce identical counts; the Python path exists for cross-checking
    and small diagnostic runs.
    """
    geom = replace(config.geometry, y1=y1)
    n_f, phases, targets, f_s0, f_s1 = _point_inputs(config, stream)
    delay_enabled = config.delay.enabled or windowed_for(config.mode)
    delay_cfg = replace(config.delay, enabled=delay_enabled)
    k = config.detector.k

    if use_kernel:
        tof = tof_matrix(geom)
        regs_init = np.empty((2, k, 2))
        for det in range(2):
            angles = kernels.TWO_PI * stream.split(f"d{det}/init").uniforms(k)
            regs_init[det, :, 0] = np.cos(angles)
            regs_init[det, :, 1] = np.sin(angles)
        n_arrivals = [int((targets == det).sum()) for det in range(2)]
        cap = max(n_arrivals[0], n_arrivals[1], 1)
        thresholds = np.empty((2, cap))
        delay_draws = np.empty((2, cap if delay_enabled else 1))
        for det in range(2):
            thresholds[det, : n_arrivals[det]] = stream.split(
                f"d{det}/thresholds"
            ).uniforms(n_arrivals[det])
            if delay_enabled:
                # mapped to (0, 1] so the exponential inverse transform is finite
                delay_draws[det, : n_arrivals[det]] = 1.0 - stream.split(
                    f"d{det}/delays"
                ).uniforms(n_arrivals[det])
        count0, count1, n_coinc = kernels.run_point_events(
            n_tot=config.n_tot,
            n_f=n_f,
            tof=tof,
            f_s0=f_s0,
            f_s1=f_s1,
            phases=phases,
            targets=targets,
            gamma=config.detector.gamma,
            regs_init=regs_init,
            thresholds=thresholds,
            delay_enabled=delay_enabled,
            t_max=delay_cfg.t_max,
            h=delay_cfg.h,
            delay_draws=delay_draws,
            windowed=windowed_for(config.mode),
            window=config.window,
            broadcast=(config.reach == REACH_BOTH),
        )
    else:
        detectors = [
            Detector(k, config.detector.gamma, stream.split(f"d{det}/init"))
            for det in range(2)
        ]
        threshold_streams = [stream.split(f"d{det}/thresholds") for det in range(2)]
        delay_streams = [stream.split(f"d{det}/delays") for det in range(2)]
        event_config = replace(config, delay=delay_cfg)
        count0 = count1 = n_coinc = 0
        for i in range(config.n_tot):
            block = i // n_f
            emission = PairEmission(
                message0=Message(frequency=float(f_s0[i]), phase=float(phases[block, 0])),
                message1=Message(frequency=float(f_s1[i]), phase=float(phases[block, 1])),
                target0=int(targets[i, 0]),
                target1=int(targets[i, 1]),
            )
            event = run_pair_event(
                event_config, geom, detectors, emission, threshold_streams, delay_streams
            )
            count0 += event.clicks[0]
            count1 += event.clicks[1]
            n_coinc += int(event.coincident)

    return PointCounts(
        y1=y1,
        delta_t=delta_t(geom),
        n_count0=int(count0),
        n_count1=int(count1),
        n_coincidence=int(n_coinc),
    )


def sweep_ordinates(config: ExperimentConfig) -> np.ndarray:
    return np.linspace(config.sweep.y1_min, config.sweep.y1_max, config.sweep.steps)


def run_sweep(
    config: ExperimentConfig, n_jobs: int = 1, use_kernel: bool = True
) -> SweepResult:
    """Run every sweep point; identical output for any ``n_jobs``.

    Per-point substreams are derived from (seed, point index) and results
    are merged by index, so parallel and sequential execution agree
    byte for byte.
    """
    if config.mode == "efficiency":
        raise ValueError("mode 'efficiency' is not a sweep; use run_efficiency")
    root = RngStream(config.seed)
    ordinates = sweep_ordinates(config)

    def one(i: int) -> PointCounts:
        return run_point(config, float(ordinates[i]), root.split(f"point{i}"), use_kernel)

    if n_jobs > 1:
        with ThreadPoolExecutor(max_workers=n_jobs) as pool:
            points = list(pool.map(one, range(len(ordinates))))
    else:
        points = [one(i) for i in range(len(ordinates))]
    return SweepResult(points=points, config=config)


def run_efficiency(config: ExperimentConfig) -> float:
    """Constant-message detection run.

    A far-away point source sends identical messengers to one port of a
    single detector (the second port when there is one, so the weights
    actually have to adapt).  Returns clicks / arrivals counted after the
    warm-up discard.
    """
    if config.efficiency.arrivals < 1:
        raise ValueError("efficiency.arrivals must be at least 1")
    stream = RngStream(config.seed).split("efficiency")
    detector = Detector(config.detector.k, config.detector.gamma, stream.split("init"))
    threshold_stream = stream.split("thresholds")
    delay_stream = stream.split("delays")
    port = 1 if config.detector.k >= 2 else 0
    message = Message(
        frequency=config.source.frequency,
        phase=0.0,
        time_of_flight=config.geometry.x,
    )
    no_delay = DelayConfig(enabled=False)
    clicks = 0
    for i in range(config.efficiency.warmup + config.efficiency.arrivals):
        outcome = detector.process_arrival(
            port, message, no_delay, threshold_stream, delay_stream
        )
        if i >= config.efficiency.warmup:
            clicks += outcome.click
    return clicks / config.efficiency.arrivals
