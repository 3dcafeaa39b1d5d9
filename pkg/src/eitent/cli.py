"""Scenario runner: INI configuration in, CSV/JSON out.

Config file layout (frequencies in units of 2 pi MHz, times in us)::

    [model]
    g1 = 1.34
    g2 = 0.134
    delta = 15
    gamma = 0.2
    omega = 0.03
    eta = 0.1
    n_max = 16            ; optional, default max(15, n_in + 12)

    [run]
    scenario = damped_oscillation
    n_in = 3
    t_end = 1100
    sample_interval = 1.0
    fit = true
    stationary_tol = 1e-9 ; optional, stop once max|d rho/dt| is below

    [schedule]
    mode = ramp           ; or constant
    t_off = 100
    delta_t = 50

    [integrator]
    method = propagator   ; or rk4
    dt = 0.002            ; optional

    [output]
    dir = out
    heatmap_times = 24, 400

Every key is optional; missing ones come from the scenario preset.

Exit codes: 0 ok, 2 configuration error, 3 truncation breach, 4 integrator
tolerance breach, 5 fit failure.
"""
from __future__ import annotations

import argparse
import configparser
import csv
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path

import numpy as np

from .atom_model import ModelParams
from .lindblad import (IntegratorConfig, Schedule, TraceDriftError,
                       TruncationError, default_n_max,
                       initial_state, integrate)
from .lz_analytic import FitError, fit_lz
from .observables import heatmap_export

EXIT_OK, EXIT_CONFIG, EXIT_TRUNCATION, EXIT_DRIFT, EXIT_FIT = 0, 2, 3, 4, 5

SWEEP_AXES = ("gamma", "n_in", "g2", "eta", "t_off", "delta_t")


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    scenario: str = "cooling"
    g1: float = 1.34
    g2: float = 0.134
    delta: float = 15.0
    gamma: float = 0.6
    omega: float = 0.03
    eta: float = 0.1
    n_max: int | None = None
    n_in: int = 4
    t_end: float = 3000.0
    sample_interval: float = 1.0
    fit: bool = False
    stationary_tol: float | None = None
    schedule_mode: str = "constant"
    t_off: float = math.inf
    delta_t: float = 0.0
    method: str = "propagator"
    dt: float | None = None
    out_dir: str = "out"
    heatmap_times: tuple = field(default_factory=tuple)

    @property
    def params(self) -> ModelParams:
        n_max = self.n_max if self.n_max is not None else default_n_max(self.n_in)
        return ModelParams.from_mhz(self.g1, self.g2, self.delta, self.gamma,
                                    self.omega, self.eta, n_max)

    @property
    def schedule(self) -> Schedule:
        if self.schedule_mode == "constant":
            return Schedule()
        return Schedule.ramp(self.t_off, self.delta_t)

    def integrator(self) -> IntegratorConfig:
        p = self.params
        if self.dt is None:
            return IntegratorConfig.for_interval(p, self.sample_interval, self.method)
        steps = max(1, round(self.sample_interval / self.dt))
        return IntegratorConfig(dt=self.dt, sample_every=steps, method=self.method)

    def validate(self) -> "RunConfig":
        if self.scenario not in SCENARIOS:
            raise ConfigError(f"unknown scenario {self.scenario!r}; choose from {sorted(SCENARIOS)}")
        if self.schedule_mode not in ("constant", "ramp"):
            raise ConfigError(f"schedule mode must be constant or ramp, got {self.schedule_mode!r}")
        if self.t_end <= 0 or self.sample_interval <= 0:
            raise ConfigError("t_end and sample_interval must be positive")
        try:
            p = self.params
            self.schedule
            self.integrator().resolved_dt(p)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        if not 0 <= self.n_in <= p.n_max:
            raise ConfigError(f"n_in={self.n_in} outside 0..{p.n_max}")
        return self


# Presets for the cooling parameters g1 = 1.34, g1/g2 = 10, omega = 0.03, Delta = 15.
SCENARIOS = {
    "cooling": dict(gamma=0.6, n_in=4, t_end=3000.0, sample_interval=2.0),
    "lz_oscillation": dict(gamma=0.0, n_in=3, t_end=600.0, sample_interval=1.0),
    "damped_oscillation": dict(gamma=0.1, n_in=3, t_end=1100.0, sample_interval=1.0, fit=True),
    "switch_off_sudden": dict(gamma=0.2, n_in=3, t_end=230.0, sample_interval=1.0,
                              schedule_mode="ramp", t_off=128.0, delta_t=1.0),
    "switch_off_adiabatic": dict(gamma=0.2, n_in=3, t_end=300.0, sample_interval=1.0,
                                 schedule_mode="ramp", t_off=100.0, delta_t=50.0),
    "stationary": dict(gamma=0.2, n_in=0, t_end=50000.0, sample_interval=25.0,
                       stationary_tol=1e-9),
}

_SECTIONS = {
    "model": {"g1": float, "g2": float, "delta": float, "gamma": float, "omega": float,
              "eta": float, "n_max": int},
    "run": {"scenario": str, "n_in": int, "t_end": float, "sample_interval": float,
            "fit": "bool", "stationary_tol": float},
    "schedule": {"mode": str, "t_off": float, "delta_t": float},
    "integrator": {"method": str, "dt": float},
    "output": {"dir": str, "heatmap_times": "floats"},
}
_RENAME = {("schedule", "mode"): "schedule_mode", ("output", "dir"): "out_dir"}


def _floats(text: str) -> tuple:
    return tuple(float(x) for x in text.replace(",", " ").split())


def parse_config_text(text: str) -> dict:
    """Parse INI text into RunConfig field overrides."""
    if not text.strip():
        raise ConfigError("configuration file is empty")
    cp = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"malformed configuration: {exc}") from exc
    out = {}
    for section in cp.sections():
        if section not in _SECTIONS:
            raise ConfigError(f"unknown section [{section}]")
        schema = _SECTIONS[section]
        for key, raw in cp.items(section):
            if key not in schema:
                raise ConfigError(f"unknown key {key!r} in [{section}]")
            kind = schema[key]
            try:
                if kind == "bool":
                    value = cp.getboolean(section, key)
                elif kind == "floats":
                    value = _floats(raw)
                else:
                    value = kind(raw)
            except ValueError as exc:
                raise ConfigError(f"bad value for {section}.{key}: {raw!r}") from exc
            out[_RENAME.get((section, key), key)] = value
    return out


def build_config(overrides: dict | None = None, scenario: str | None = None) -> RunConfig:
    overrides = dict(overrides or {})
    name = scenario or overrides.get("scenario", "cooling")
    if name not in SCENARIOS:
        raise ConfigError(f"unknown scenario {name!r}; choose from {sorted(SCENARIOS)}")
    values = {**SCENARIOS[name], **overrides, "scenario": name}
    return RunConfig(**values).validate()


def load_config(path, scenario: str | None = None) -> RunConfig:
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"configuration file {path} not found")
    return build_config(parse_config_text(path.read_text()), scenario)


def _value_at(series, t):
    i = int(np.searchsorted(series.t, t - 1e-9))
    return float(series.negativity[min(i, len(series) - 1)])


def run_scenario(config: RunConfig, out_dir=None) -> dict:
    """Run one configuration and write ``series.csv``, ``summary.json`` and heatmaps.

    Engine errors (:class:`TruncationError`, :class:`TraceDriftError`,
    :class:`FitError`) propagate to the caller.
    """
    out = Path(out_dir or config.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    params = config.params
    series = integrate(initial_state(params, config.n_in), config.t_end, params,
                       schedule=config.schedule, config=config.integrator(),
                       snapshot_times=config.heatmap_times,
                       stationary_tol=config.stationary_tol)
    series.to_csv(out / "series.csv")
    heatmaps = []
    for t, rho in sorted(series.snapshots.items()):
        heatmaps.append(heatmap_export(rho, out / f"heatmap_t{t:g}.csv", params.space).name)

    summary = {"scenario": config.scenario,
               "config": {k: v for k, v in asdict(config).items() if k != "out_dir"},
               "final": series.last_row(),
               "final_negativity": float(series.negativity[-1]),
               "final_mean_n": float(series.mean_n[-1]),
               "photon_crossings_us": [float(x) for x in series.photon_crossings],
               "heatmaps": heatmaps}
    if config.stationary_tol is not None:
        summary["stationary_reached"] = bool(series.t[-1] < config.t_end - 1e-9)
    if config.schedule_mode == "ramp":
        summary["negativity_at_t_off"] = _value_at(series, config.t_off)
        summary["negativity_at_ramp_end"] = _value_at(series, config.t_off + config.delta_t)
    if config.fit:
        try:
            fit = fit_lz(series.t, series.negativity)
        except ValueError as exc:
            raise FitError(str(exc)) from exc
        summary["fit"] = {"delta_e_fit": fit.delta_e_fit, "gamma1_fit": fit.gamma1_fit,
                          "residual": fit.residual, "classification": fit.classification,
                          "window_us": list(fit.window)}
    (out / "summary.json").write_text(json.dumps(_jsonable(summary), indent=2))
    return summary


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    return obj


def _sweep_point(args):
    config, out = args
    return run_scenario(config, out)


def sweep(config: RunConfig, axis: str, values, out_dir=None, workers: int = 1) -> list[dict]:
    """Run ``config`` once per value of ``axis`` and aggregate into ``sweep_<axis>.csv``.

    Each point writes into its own subdirectory; only this function writes the
    aggregate file.
    """
    if axis not in SWEEP_AXES:
        raise ConfigError(f"sweep axis must be one of {SWEEP_AXES}, got {axis!r}")
    out = Path(out_dir or config.out_dir)
    points = []
    for v in values:
        v = int(v) if axis == "n_in" else float(v)
        changes = {axis: v}
        if axis in ("t_off", "delta_t"):
            changes["schedule_mode"] = "ramp"
        try:
            cfg = replace(config, **changes).validate()
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        points.append((cfg, out / f"{axis}_{v:g}"))
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            summaries = list(pool.map(_sweep_point, points))
    else:
        summaries = [_sweep_point(p) for p in points]

    header = [axis, "final_negativity", "final_mean_n", "final_fidelity", "photon_count",
              "delta_e_fit", "gamma1_fit", "classification"]
    with (out / f"sweep_{axis}.csv").open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for (cfg, _), s in zip(points, summaries):
            fit = s.get("fit", {})
            w.writerow([getattr(cfg, axis), repr(s["final_negativity"]), repr(s["final_mean_n"]),
                        repr(s["final"]["fidelity"]), repr(s["final"]["photon_count"]),
                        fit.get("delta_e_fit", ""), fit.get("gamma1_fit", ""),
                        fit.get("classification", "")])
    return summaries


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="eitent", description=__doc__.split("\n")[0],
                                epilog=f"scenarios: {', '.join(SCENARIOS)}")
    p.add_argument("--config", type=Path, help="INI configuration file")
    p.add_argument("--scenario", choices=sorted(SCENARIOS))
    p.add_argument("--sweep", metavar="AXIS=v1,v2,...",
                   help=f"sweep one of {', '.join(SWEEP_AXES)}")
    p.add_argument("--out", type=Path, help="output directory")
    p.add_argument("--dt", type=float, help="RK4 step in us")
    p.add_argument("--nmax", type=int, help="vibrational truncation")
    p.add_argument("--heatmap-times", help="comma-separated snapshot times in us")
    p.add_argument("--workers", type=int, default=1, help="parallel sweep workers")
    return p


def main(argv=None) -> int:
    parser = _parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_CONFIG
    try:
        overrides = parse_config_text(args.config.read_text()) if args.config else {}
        if args.out is not None:
            overrides["out_dir"] = str(args.out)
        if args.dt is not None:
            overrides["dt"] = args.dt
        if args.nmax is not None:
            overrides["n_max"] = args.nmax
        if args.heatmap_times:
            overrides["heatmap_times"] = _floats(args.heatmap_times)
        config = build_config(overrides, args.scenario)
        if args.sweep:
            axis, _, raw = args.sweep.partition("=")
            values = _floats(raw)
            if not values:
                raise ConfigError("--sweep needs AXIS=v1,v2,...")
            sweep(config, axis.strip(), values, workers=args.workers)
        else:
            run_scenario(config)
    except (ConfigError, OSError) as exc:
        print(f"eitent: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except TruncationError as exc:
        print(f"eitent: truncation breach: {exc}", file=sys.stderr)
        return EXIT_TRUNCATION
    except TraceDriftError as exc:
        print(f"eitent: integrator tolerance breach: {exc}", file=sys.stderr)
        return EXIT_DRIFT
    except FitError as exc:
        print(f"eitent: fit failed: {exc} (best={exc.best}, residual={exc.residual})", file=sys.stderr)
        return EXIT_FIT
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
