"""Monte Carlo experiments: configs, trial orchestration, estimates, sweeps.

Trial ``i`` of a run with master seed ``s`` draws from the counter-based
stream ``(s, i)`` (see ``rumour.rng``); sweep row ``g`` uses the lane seed
``lane_seed(s, g)``. Trials are split into fixed-size chunks, so results do
not depend on the number of worker threads.
"""

from __future__ import annotations

import copy
import csv
import io
import json
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from statistics import NormalDist
from typing import Any

import numpy as np

from . import analytics
from .distributions import DistributionSchedule, HomogeneousSchedule, as_schedule, distribution_from_spec
from .processes import VertexLayout, firework_batch, firework_setup, reverse_batch, reverse_setup
from .rng import MASK64, lane_seed

CHUNK = 4096
Z95 = NormalDist().inv_cdf(0.975)
PROCESSES = ("firework", "reverse")
SWEEP_PARAMS = ("alpha", "q", "c", "horizon")
CSV_COLUMNS = (
    "process", "schedule_label", "param_name", "param_value", "horizon", "trials",
    "survivors", "p_hat", "ci_lo", "ci_hi", "verdict", "rule", "lower_bound",
    "upper_bound", "seed", "duration_ms",
)


class ConfigError(ValueError):
    """Invalid configuration; ``field`` names the offending key."""

    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field


def _int_field(doc: dict, name: str, default, lo: int, hi: int | None = None, optional=False):
    value = doc.get(name, default)
    if value is None and optional:
        return None
    if isinstance(value, bool) or not isinstance(value, int):
        if isinstance(value, float) and value.is_integer():
            value = int(value)
        else:
            raise ConfigError(name, f"expected an integer, got {value!r}")
    if value < lo or (hi is not None and value > hi):
        rng = f"[{lo}, {hi}]" if hi is not None else f">= {lo}"
        raise ConfigError(name, f"must be {rng}, got {value}")
    return value


def sweep_grid(start: float, stop: float, step: float) -> list[float]:
    """Inclusive arithmetic grid, robust to float steps (1.2..2.6 by 0.2 has 8 points)."""
    if not step > 0:
        raise ConfigError("sweep.step", f"must be > 0, got {step}")
    if stop < start:
        raise ConfigError("sweep.to", f"must be >= from ({start}), got {stop}")
    count = int(math.floor((stop - start) / step + 1e-9)) + 1
    return [round(start + i * step, 12) for i in range(count)]


@dataclass
class ExperimentConfig:
    process: str = "firework"
    schedule: dict = field(default_factory=lambda: {"kind": "power_law", "alpha": 1.5})
    layout: dict = field(default_factory=lambda: {"kind": "identity"})
    horizon: int = 1000
    trials: int = 10000
    seed: int = 0
    generation_cap: int | None = None
    bound_depth: int = 1000
    sweep: dict | None = None
    out: str | None = None
    format: str = "csv"

    KEYS = ("process", "schedule", "layout", "horizon", "trials", "seed", "generation_cap",
            "bound_depth", "sweep", "out", "format")

    def __post_init__(self):
        self.validate()

    @classmethod
    def from_dict(cls, doc: dict) -> "ExperimentConfig":
        if not isinstance(doc, dict):
            raise ConfigError("config", "expected a JSON object")
        unknown = sorted(set(doc) - set(cls.KEYS))
        if unknown:
            raise ConfigError(unknown[0], "unknown field")
        return cls(**copy.deepcopy(doc))

    def to_dict(self) -> dict:
        return {k: copy.deepcopy(getattr(self, k)) for k in self.KEYS}

    def replace(self, **changes) -> "ExperimentConfig":
        doc = self.to_dict()
        doc.update(changes)
        return ExperimentConfig.from_dict(doc)

    def validate(self) -> None:
        if self.process not in PROCESSES:
            raise ConfigError("process", f"expected one of {PROCESSES}, got {self.process!r}")
        doc = {k: getattr(self, k) for k in self.KEYS}
        _int_field(doc, "horizon", 1000, 1)
        _int_field(doc, "trials", 10000, 1)
        _int_field(doc, "seed", 0, 0, MASK64)
        _int_field(doc, "generation_cap", None, 1, optional=True)
        _int_field(doc, "bound_depth", 1000, 1)
        for name in ("horizon", "trials", "seed", "bound_depth"):
            setattr(self, name, int(getattr(self, name)))
        if self.generation_cap is not None:
            self.generation_cap = int(self.generation_cap)
        if self.format not in ("csv", "json"):
            raise ConfigError("format", f"expected csv or json, got {self.format!r}")
        self.build_schedule()
        layout = self.build_layout()
        if self.process == "reverse" and layout.kind != "identity":
            raise ConfigError("layout", "the reverse process is defined on the identity layout only")
        if self.sweep is not None:
            self.grid()

    def build_schedule(self) -> DistributionSchedule:
        try:
            return as_schedule(distribution_from_spec(self.schedule))
        except ConfigError:
            raise
        except (ValueError, TypeError, KeyError) as exc:
            raise ConfigError("schedule", str(exc)) from None

    def build_layout(self) -> VertexLayout:
        try:
            return VertexLayout.from_spec(self.layout)
        except (ValueError, TypeError, KeyError) as exc:
            raise ConfigError("layout", str(exc)) from None

    def grid(self) -> tuple[str, list[float]]:
        sw = self.sweep
        if not isinstance(sw, dict):
            raise ConfigError("sweep", "expected an object")
        param = sw.get("param")
        if param not in SWEEP_PARAMS:
            raise ConfigError("sweep.param", f"expected one of {SWEEP_PARAMS}, got {param!r}")
        if "values" in sw:
            values = sw["values"]
            if not isinstance(values, list):
                raise ConfigError("sweep.values", "expected a list")
        else:
            try:
                values = sweep_grid(float(sw["from"]), float(sw["to"]), float(sw["step"]))
            except KeyError as exc:
                raise ConfigError(f"sweep.{exc.args[0]}", "missing") from None
        if not values:
            raise ConfigError("sweep.values", "grid is empty")
        kind = self.schedule.get("kind") if isinstance(self.schedule, dict) else None
        needs = {"alpha": "power_law", "q": "geometric", "c": "schedule"}
        if param in needs and kind != needs[param]:
            raise ConfigError("sweep.param", f"{param!r} does not apply to schedule kind {kind!r}")
        if param == "c" and self.schedule.get("b", {}).get("family") == "user_table":
            raise ConfigError("sweep.param", "'c' does not apply to a user_table b sequence")
        for v in values:
            try:
                self.at(param, v).build_schedule()
            except ConfigError as exc:
                raise ConfigError("sweep.values", f"{param}={v}: {exc}") from None
        return param, [float(v) if param != "horizon" else int(v) for v in values]

    def at(self, param: str, value) -> "ExperimentConfig":
        """Copy of the config with the sweep parameter set (sweep removed)."""
        doc = self.to_dict()
        doc["sweep"] = None
        if param == "horizon":
            doc["horizon"] = value
        elif param == "c":
            doc["schedule"]["b"]["c"] = value
        else:
            doc["schedule"][param] = value
        try:
            return ExperimentConfig.from_dict(doc)
        except ConfigError as exc:
            raise ConfigError("sweep.values", f"{param}={value}: {exc}") from None


@dataclass
class SurvivalEstimate:
    trials: int
    survivors: int
    p_hat: float
    ci_lo: float
    ci_hi: float
    horizon: int
    seed: int
    duration_ms: float = 0.0

    def __post_init__(self):
        if not 0 <= self.survivors <= self.trials:
            raise ValueError("survivors must lie in [0, trials]")
        if not 0.0 <= self.ci_lo <= self.p_hat <= self.ci_hi <= 1.0:
            raise ValueError("Wilson interval must contain p_hat inside [0, 1]")

    @property
    def sigma(self) -> float:
        """Wilson half-width divided by the 95% z value."""
        return (self.ci_hi - self.ci_lo) / (2 * Z95)


def wilson_interval(survivors: int, trials: int, z: float = Z95) -> tuple[float, float]:
    if trials < 1:
        raise ValueError("trials must be >= 1")
    p = survivors / trials
    z2 = z * z
    denom = 1 + z2 / trials
    centre = (p + z2 / (2 * trials)) / denom
    half = z * math.sqrt(p * (1 - p) / trials + z2 / (4 * trials * trials)) / denom
    lo, hi = max(0.0, centre - half), min(1.0, centre + half)
    # guard rounding at the endpoints so the interval always contains p
    return min(lo, p), max(hi, p)


def default_workers() -> int:
    env = os.environ.get("RUMOUR_SIM_WORKERS")
    if env:
        return int(env)
    return os.cpu_count() or 1


def _chunks(trials: int):
    return [(s, min(CHUNK, trials - s)) for s in range(0, trials, CHUNK)]


def survival_indicators(config: ExperimentConfig, workers: int | None = None,
                        seed: int | None = None) -> np.ndarray:
    """Per-trial survival-to-horizon indicators, in trial order."""
    workers = workers or default_workers()
    if workers < 1:
        raise ValueError("workers must be >= 1")
    seed = config.seed if seed is None else seed
    schedule = config.build_schedule()
    horizon = config.horizon
    if config.process == "firework":
        layout = config.build_layout()
        setup = firework_setup(schedule, layout, horizon)

        def job(chunk):
            return firework_batch(layout, schedule, horizon, seed, chunk[0], chunk[1], setup).survived
    else:
        setup = reverse_setup(schedule, horizon)

        def job(chunk):
            return reverse_batch(schedule, horizon, config.generation_cap, seed,
                                 chunk[0], chunk[1], setup).survived

    chunks = _chunks(config.trials)
    if workers == 1 or len(chunks) == 1:
        parts = [job(c) for c in chunks]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(job, chunks))
    return np.concatenate(parts)


def run_trials(config: ExperimentConfig, workers: int | None = None,
               seed: int | None = None) -> SurvivalEstimate:
    seed = config.seed if seed is None else seed
    t0 = time.perf_counter()
    survived = survival_indicators(config, workers, seed)
    survivors = int(survived.sum())
    lo, hi = wilson_interval(survivors, config.trials)
    elapsed = (time.perf_counter() - t0) * 1000
    return SurvivalEstimate(config.trials, survivors, survivors / config.trials, lo, hi,
                            config.horizon, seed, elapsed)


def criteria_for(config: ExperimentConfig) -> tuple[analytics.Verdict, analytics.BoundsReport]:
    """Analytic verdict and bounds matching the config's process and law."""
    schedule = config.build_schedule()
    homogeneous = isinstance(schedule, HomogeneousSchedule)
    if config.process == "reverse":
        verdict = (analytics.classify_reverse_homogeneous(schedule.dist) if homogeneous
                   else analytics.classify_reverse_heterogeneous(schedule))
        return verdict, analytics.reverse_bounds(schedule, config.bound_depth)
    m = config.build_layout().gap_bound
    if m is None:
        return (analytics.Verdict(analytics.INCONCLUSIVE, evidence={"reason": "layout has no gap bound"}),
                analytics.BoundsReport())
    if homogeneous and m == 1:
        verdict = analytics.classify_firework_homogeneous(schedule.dist)
    else:
        verdict = analytics.classify_firework_heterogeneous(schedule, m)
    bounds = analytics.firework_bounds(schedule, m, config.bound_depth)
    if bounds.upper is not None and m == 1:
        # compare against the simulated horizon rather than the lower-bound depth
        if homogeneous:
            upper = analytics.upper_bound_firework_homogeneous(schedule.dist, config.horizon)
        else:
            upper = analytics.BoundEntry(analytics.upper_bound_reach_heterogeneous(schedule, config.horizon),
                                         False, {"n": config.horizon})
        bounds = analytics.BoundsReport(bounds.lower, upper)
    return verdict, bounds


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def estimate_row(config: ExperimentConfig, est: SurvivalEstimate, param_name: str = "",
                 param_value: Any = None, with_criteria: bool = True, timing: bool = False) -> dict:
    verdict = bounds = None
    if with_criteria:
        verdict, bounds = criteria_for(config)
    schedule = config.build_schedule()
    return {
        "process": config.process,
        "schedule_label": schedule.label,
        "param_name": param_name,
        "param_value": param_value,
        "horizon": config.horizon,
        "trials": est.trials,
        "survivors": est.survivors,
        "p_hat": est.p_hat,
        "ci_lo": est.ci_lo,
        "ci_hi": est.ci_hi,
        "verdict": verdict.classification if verdict else None,
        "rule": verdict.rule if verdict else None,
        "lower_bound": bounds.lower.value if bounds and bounds.lower else None,
        "upper_bound": bounds.upper.value if bounds and bounds.upper else None,
        "seed": est.seed,
        "duration_ms": round(est.duration_ms, 3) if timing else None,
    }


def run_sweep(config: ExperimentConfig, workers: int | None = None, timing: bool = False) -> list[dict]:
    """One row per grid point; row ``g`` uses seed lane ``g`` of the master seed."""
    if config.sweep is None:
        raise ConfigError("sweep", "missing sweep descriptor")
    param, values = config.grid()
    rows = []
    for g, value in enumerate(values):
        point = config.at(param, value)
        est = run_trials(point, workers, seed=lane_seed(config.seed, g))
        rows.append(estimate_row(point, est, param, value, timing=timing))
    return rows


def rows_to_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: _fmt(row[k]) for k in CSV_COLUMNS})
    return buf.getvalue()


REVERSE_WINDOW_NOTE = ("vertices beyond the horizon are excluded; "
                       "survival-to-horizon is biased downward")


def rows_to_json(rows: list[dict], config: ExperimentConfig) -> str:
    doc = {"config": config.to_dict(), "rows": [analytics._jsonable(r) for r in rows]}
    if config.process == "reverse":
        doc["metadata"] = {"window": REVERSE_WINDOW_NOTE}
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"
