"""Command-line entry points and output writers.

Commands:

* ``simulate``    run a sweep (or the efficiency experiment), fit the
                  fringe, and write ``sweep.csv`` + ``fit.txt``
* ``predict``     emit the closed-form reference curves as CSV
* ``efficiency``  run the constant-message detection experiment
* ``selftest``    quick invariant suite, one PASS/FAIL line per check

All numeric output is printed with 17 significant digits so repeated runs
with the same seed produce byte-identical files.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from .config import ConfigError, config_digest, parse_config
from .experiment import ExperimentConfig, SweepResult, run_efficiency, run_sweep
from .fitting import analyze_sweep
from .oracle import intensity_correlation, predicted_coincidence


def _fmt(x: float) -> str:
    return f"{x:.17g}"


_PREDICTION_MODE = {"hbt": "simple", "hbt-delay": "delay", "boson": "boson",
                    "nonmono": "boson"}


def predicted_curve(result: SweepResult) -> np.ndarray:
    """Reference coincidence curve at the sweep points.

    The simple-coincidence mode has a closed form; the windowed modes use
    the fitted (a, b) constants, so the sweep must be analysed first.
    """
    mode = _PREDICTION_MODE[result.config.mode]
    dt = np.array([p.delta_t for p in result.points])
    fit = None
    if mode != "simple":
        if result.coincidence_fit is None:
            raise ValueError("windowed modes need analyze_sweep before prediction")
        fit = (result.coincidence_fit.a, result.coincidence_fit.b)
    return np.asarray(
        predicted_coincidence(
            result.config.n_tot, dt, result.config.source.frequency, mode, fit
        )
    )


def write_sweep_csv(result: SweepResult, path: Path | str) -> None:
    """One data row per sweep point in y1 order, plus the header echo."""
    if not result.points:
        raise ValueError("refusing to write an empty sweep")
    predicted = predicted_curve(result)
    lines = [
        f"# seed={result.config.seed} mode={result.config.mode}",
        f"# config={config_digest(result.config)}",
        "y1_f_over_c,deltaT_f,n_count_d0,n_count_d1,n_coincidence,predicted",
    ]
    for point, pred in zip(result.points, predicted):
        lines.append(
            ",".join(
                (
                    _fmt(point.y1),
                    _fmt(point.delta_t),
                    str(point.n_count0),
                    str(point.n_count1),
                    str(point.n_coincidence),
                    _fmt(float(pred)),
                )
            )
        )
    Path(path).write_text("\n".join(lines) + "\n")


def write_fit_txt(result: SweepResult, path: Path | str) -> None:
    """Fitted fringe constants and visibilities."""
    if result.coincidence_fit is None or result.singles_a is None:
        raise ValueError("run analyze_sweep before writing fit output")
    fit = result.coincidence_fit
    lines = [
        f"# seed={result.config.seed} mode={result.config.mode} "
        f"config={config_digest(result.config)}",
        f"a={_fmt(fit.a)}",
        f"b={_fmt(fit.b)}",
        f"visibility={_fmt(fit.visibility)}",
        f"residual={_fmt(fit.residual_norm)}",
        f"singles_a_d0={_fmt(result.singles_a[0])}",
        f"singles_a_d1={_fmt(result.singles_a[1])}",
        f"visibility_empirical={_fmt(result.visibility)}",
    ]
    Path(path).write_text("\n".join(lines) + "\n")


def write_efficiency_txt(config: ExperimentConfig, rate: float, path: Path | str) -> None:
    lines = [
        f"# seed={config.seed} mode=efficiency config={config_digest(config)}",
        f"rate={_fmt(rate)}",
    ]
    Path(path).write_text("\n".join(lines) + "\n")


def _load_config(args) -> ExperimentConfig:
    text = Path(args.config).read_text() if args.config else ""
    overrides: dict[str, str] = {}
    if getattr(args, "mode", None):
        overrides["mode"] = args.mode
    if getattr(args, "seed", None) is not None:
        overrides["seed"] = str(args.seed)
    return parse_config(text, overrides)


def _cmd_simulate(args) -> int:
    config = _load_config(args)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    if config.mode == "efficiency":
        rate = run_efficiency(config)
        write_efficiency_txt(config, rate, out / "efficiency.txt")
        print(f"efficiency rate={rate:.6f} -> {out / 'efficiency.txt'}")
        return 0
    result = run_sweep(config, n_jobs=args.jobs)
    analyze_sweep(result)
    write_sweep_csv(result, out / "sweep.csv")
    write_fit_txt(result, out / "fit.txt")
    fit = result.coincidence_fit
    print(
        f"mode={config.mode} seed={config.seed} points={len(result.points)} "
        f"a={fit.a:.4f} b={fit.b:.4f} visibility={result.visibility:.4f}"
    )
    print(f"wrote {out / 'sweep.csv'} and {out / 'fit.txt'}")
    return 0


def _cmd_predict(args) -> int:
    dt = np.linspace(args.dt_min, args.dt_max, args.steps)
    classical = intensity_correlation(dt, args.frequency, args.amplitude, "classical")
    boson = intensity_correlation(dt, args.frequency, args.amplitude, "boson")
    simple = predicted_coincidence(args.n_tot, dt, args.frequency, "simple")
    lines = [
        f"# amplitude={_fmt(args.amplitude)} frequency={_fmt(args.frequency)} "
        f"n_tot={args.n_tot}",
        "deltaT_f,intensity_product_classical,intensity_product_boson,"
        "coincidence_simple",
    ]
    for i in range(dt.size):
        lines.append(
            ",".join(
                (_fmt(dt[i]), _fmt(classical[i]), _fmt(boson[i]), _fmt(simple[i]))
            )
        )
    text = "\n".join(lines) + "\n"
    if args.out:
        Path(args.out).write_text(text)
        print(f"wrote {args.out}")
    else:
        sys.stdout.write(text)
    return 0


def _cmd_efficiency(args) -> int:
    config = _load_config(args)
    rate = run_efficiency(config)
    print(f"rate={rate:.6f} (gamma={config.detector.gamma}, "
          f"warmup={config.efficiency.warmup}, arrivals={config.efficiency.arrivals})")
    return 0


def _selftest_checks():
    import math

    from .detector import Detector, threshold
    from .fitting import fit_cosine
    from .geometry import Geometry, delta_t
    from .rng import RngStream

    def rng_streams():
        a = RngStream(11, "x")
        b = RngStream(11, "x")
        assert np.allclose(a.uniforms(5), b.uniforms(5))
        c = RngStream(11, "y")
        assert not np.allclose(RngStream(11, "x").uniforms(5), c.uniforms(5))

    def rng_range_mean():
        u = RngStream(3, "selftest").uniforms(100_000)
        assert u.min() >= 0.0 and u.max() < 1.0
        assert abs(u.mean() - 0.5) < 0.01

    def detector_simplex():
        stream = RngStream(5, "det")
        det = Detector(3, 0.7, stream.split("init"))
        ports = (stream.split("ports").uniforms(200) * 3).astype(int)
        angles = stream.split("angles").uniforms(200) * 2 * math.pi
        for port, angle in zip(ports, angles):
            det.update(int(port), (math.cos(angle), math.sin(angle)))
            tx, ty = det.response()
            assert abs(det.weights.sum() - 1.0) < 1e-12
            assert det.weights.min() >= 0.0
            assert tx * tx + ty * ty <= 1.0 + 1e-12

    def detector_convergence():
        det = Detector(2, 0.99, RngStream(5, "conv"))
        for n in range(1, 2001):
            det.update(1, (1.0, 0.0))
            expected = 1.0 - 0.99**n
            assert abs(det.weights[1] - expected) < 1e-12

    def threshold_law():
        stream = RngStream(7, "thresh")
        rate = sum(threshold(0.5, stream) for _ in range(20_000)) / 20_000
        assert abs(rate - 0.5) < 0.02

    def geometry_checks():
        from dataclasses import replace

        geom = Geometry(x=100000.0, d=2000.0, y1=25.0)
        assert abs(delta_t(replace(geom, y1=0.0))) < 1e-12
        assert abs(delta_t(geom) - 0.5) < 1e-3

    def fit_recovery():
        dt = np.linspace(-2, 2, 31)
        counts = 0.125 * 1e6 * (1 + 0.5 * np.cos(2 * math.pi * dt))
        fit = fit_cosine(dt, counts, 1_000_000)
        assert abs(fit.a - 0.125) < 1e-10 and abs(fit.b - 0.5) < 1e-10

    def sweep_determinism():
        from .config import parse_config
        from .experiment import run_sweep

        cfg = parse_config(
            "", {"n_tot": "2000", "sweep.steps": "3", "seed": "99"}
        )
        first = run_sweep(cfg)
        second = run_sweep(cfg)
        parallel = run_sweep(cfg, n_jobs=2)
        assert first.points == second.points == parallel.points

    def efficiency_quick():
        from .config import parse_config
        from .experiment import run_efficiency

        cfg = parse_config(
            "",
            {
                "mode": "efficiency",
                "detector.gamma": "0.9",
                "efficiency.warmup": "200",
                "efficiency.arrivals": "1000",
            },
        )
        assert run_efficiency(cfg) >= 0.99

    return [
        ("rng stream determinism and label sensitivity", rng_streams),
        ("rng range and mean", rng_range_mean),
        ("detector simplex and response bound", detector_simplex),
        ("detector geometric convergence", detector_convergence),
        ("threshold click law", threshold_law),
        ("geometry path-time combination", geometry_checks),
        ("fringe fit exact recovery", fit_recovery),
        ("sweep determinism incl. parallel", sweep_determinism),
        ("detection efficiency", efficiency_quick),
    ]


def _cmd_selftest(_args) -> int:
    failures = 0
    for name, check in _selftest_checks():
        try:
            check()
        except Exception as exc:  # report and continue
            failures += 1
            print(f"FAIL {name}: {exc}")
        else:
            print(f"PASS {name}")
    return 1 if failures else 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hbtsim",
        description="Event-by-event two-photon interference simulator",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run a sweep and fit the fringe")
    sim.add_argument("--mode", choices=["hbt", "hbt-delay", "boson", "efficiency",
                                        "nonmono"])
    sim.add_argument("--config", help="key/value config file")
    sim.add_argument("--seed", type=int, help="override the config seed")
    sim.add_argument("--out", default=".", help="output directory")
    sim.add_argument("--jobs", type=int, default=1, help="parallel sweep workers")
    sim.set_defaults(func=_cmd_simulate)

    pred = sub.add_parser("predict", help="closed-form reference curves as CSV")
    pred.add_argument("--n-tot", type=int, default=2_000_000)
    pred.add_argument("--amplitude", type=float, default=1.0)
    pred.add_argument("--frequency", type=float, default=1.0)
    pred.add_argument("--dt-min", type=float, default=-2.0)
    pred.add_argument("--dt-max", type=float, default=2.0)
    pred.add_argument("--steps", type=int, default=81)
    pred.add_argument("--out", help="output file (default stdout)")
    pred.set_defaults(func=_cmd_predict)

    eff = sub.add_parser("efficiency", help="constant-message detection run")
    eff.add_argument("--config", help="key/value config file")
    eff.add_argument("--seed", type=int)
    eff.set_defaults(func=_cmd_efficiency)

    self_p = sub.add_parser("selftest", help="quick invariant suite")
    self_p.set_defaults(func=_cmd_selftest)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
