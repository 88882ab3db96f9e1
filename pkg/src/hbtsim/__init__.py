"""Event-by-event Monte Carlo simulation of two-photon intensity
interference with adaptive threshold detectors, plus the closed-form wave
reference and fringe-fit analysis."""

from .config import ConfigError, config_digest, default_config, parse_config
from .detector import ArrivalOutcome, DelayConfig, Detector, DetectorConfig
from .experiment import (
    ExperimentConfig,
    PairEvent,
    PointCounts,
    SweepResult,
    run_efficiency,
    run_pair_event,
    run_point,
    run_sweep,
)
from .fitting import FitError, FitResult, analyze_sweep, fit_constant, fit_cosine
from .geometry import Geometry, delta_t, time_of_flight
from .messenger import Message, PairEmission, SourceConfig
from .oracle import WaveParams, intensity, intensity_correlation, predicted_coincidence, visibility
from .rng import RngStream

__version__ = "0.1.0"
