"""
Parameter sweeps over one scenario axis, and their result files.

A sweep evaluates a list of metrics at every value of one axis, analytically,
by simulation, or both, and returns a long-format ``pandas.DataFrame`` with
one row per (axis value, metric, method). Row order follows the axis values,
then the method, then the metric order of the request.
"""
from __future__ import annotations

import json
import logging
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd

from . import analytic, simulator
from .config import beam_preset
from .errors import ConfigError, Mmv2iError, ResultsIOError
from .model import LinkState, ScenarioConfig
from .numerics import DEFAULT_QUADRATURE, QuadratureSpec

logger = logging.getLogger(__name__)

COLUMNS = ("axis_name", "axis_value", "metric", "method", "value",
           "std_error", "trials", "seed", "wall_ms")

# axis -> unit of its values
AXES = {
    "bs_density": "BS/km",
    "beamwidth_preset": "deg",
    "slot": "s",
    "speed": "km/h",
}
METRICS = ("P_NL", "P_cov", "P_C", "P_L", "B")
METHODS = ("analytic", "simulate", "both")

# Monte Carlo estimate reported under each metric name. Analytic P_NL averages
# over every serving distance, so it pairs with the unconditional estimate.
SIMULATED_METRIC = {"P_NL": "P_NL_all", "P_cov": "P_cov", "P_C": "P_C", "P_L": "P_L", "B": "B"}

SIGNIFICANT_DIGITS = 12


def scenario_at(base: ScenarioConfig, axis: str, value: float) -> ScenarioConfig:
    """``base`` with one axis set, ``value`` in the axis unit.

    Speeds are converted under the unit conventions of ``base``.
    """
    if axis == "bs_density":
        return base.replace(bs_density=value / 1e3)
    if axis == "slot":
        return base.replace(slot=value)
    if axis == "speed":
        return base.with_speed_kmh(value)
    if axis == "beamwidth_preset":
        preset = beam_preset(f"psi{value:g}")
        side_db = 10 * math.log10(base.bs_antenna.side_gain)
        return base.replace(bs_antenna=preset.antenna(side_db))
    raise ConfigError("sweep.axis", f"must be one of {', '.join(AXES)}, got {axis!r}")


@dataclass(frozen=True)
class SweepSpec:
    base: ScenarioConfig
    axis: str
    values: Tuple[float, ...]
    metrics: Tuple[str, ...] = ("P_NL",)
    method: str = "analytic"
    trials: int = simulator.DEFAULT_TRIALS
    seed: int = 0
    workers: int = 1
    quadrature: QuadratureSpec = field(default=DEFAULT_QUADRATURE, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))
        object.__setattr__(self, "metrics", tuple(self.metrics))
        if self.axis not in AXES:
            raise ConfigError("sweep.axis", f"must be one of {', '.join(AXES)}, got {self.axis!r}")
        if not self.values:
            raise ConfigError("sweep.values", "must not be empty")
        if not self.metrics:
            raise ConfigError("sweep.metrics", "must not be empty")
        unknown = [m for m in self.metrics if m not in METRICS]
        if unknown:
            raise ConfigError("sweep.metrics", f"unknown metric(s) {', '.join(unknown)}")
        if self.method not in METHODS:
            raise ConfigError("sweep.method", f"must be one of {', '.join(METHODS)}")
        if self.trials < 1:
            raise ConfigError("sweep.trials", "must be >= 1")
        if self.workers < 1:
            raise ConfigError("sweep.workers", "must be >= 1")
        for value in self.values:
            self.scenario(value)

    def scenario(self, value: float) -> ScenarioConfig:
        return scenario_at(self.base, self.axis, value)

    @property
    def methods(self) -> Tuple[str, ...]:
        return ("analytic", "simulate") if self.method == "both" else (self.method,)


def evaluate_analytic(cfg: ScenarioConfig, metric: str,
                      spec: QuadratureSpec = DEFAULT_QUADRATURE) -> float:
    if metric == "P_NL":
        return analytic.no_leave_probability(cfg, spec)
    if metric == "P_cov":
        return analytic.coverage_probability(cfg, spec=spec).p_cov
    if metric == "P_C":
        return analytic.connectivity_probability(cfg, spec).p_c
    if metric == "P_L":
        return analytic.association_probability(cfg, LinkState.LOS, spec)
    if metric == "B":
        return analytic.slot_throughput(cfg, spec)
    raise ConfigError("metric", f"unknown metric {metric!r}")


def _row(spec: SweepSpec, value: float, metric: str, method: str, estimate: float,
         std_error: float, trials: Any, seed: Any, wall_ms: float) -> Dict[str, Any]:
    return dict(axis_name=spec.axis, axis_value=value, metric=metric, method=method,
                value=estimate, std_error=std_error, trials=trials, seed=seed, wall_ms=wall_ms)


def _analytic_rows(spec: SweepSpec, value: float) -> List[Dict[str, Any]]:
    cfg = spec.scenario(value)
    rows = []
    for metric in spec.metrics:
        start = time.perf_counter()
        try:
            estimate = evaluate_analytic(cfg, metric, spec.quadrature)
        except Mmv2iError as exc:
            logger.warning("%s = %g: analytic %s failed: %s", spec.axis, value, metric, exc)
            estimate = math.nan
        wall_ms = (time.perf_counter() - start) * 1e3
        rows.append(_row(spec, value, metric, "analytic", estimate, 0.0, pd.NA, pd.NA, wall_ms))
    return rows


def _simulated_rows(spec: SweepSpec, value: float) -> List[Dict[str, Any]]:
    cfg = spec.scenario(value)
    start = time.perf_counter()
    try:
        estimates = simulator.run_monte_carlo(cfg, spec.trials, spec.seed, spec.workers)
    except Mmv2iError as exc:
        logger.warning("%s = %g: simulation failed: %s", spec.axis, value, exc)
        estimates = {}
    wall_ms = (time.perf_counter() - start) * 1e3
    rows = []
    for metric in spec.metrics:
        estimate = estimates.get(SIMULATED_METRIC[metric], simulator.MetricEstimate.not_applicable())
        rows.append(_row(spec, value, metric, "simulate", estimate.mean, estimate.std_error,
                         spec.trials, spec.seed, wall_ms))
    return rows


def run_sweep(spec: SweepSpec) -> pd.DataFrame:
    """Evaluate every requested metric at every axis value.

    A point that fails is recorded with ``value = NaN`` and a warning; the
    sweep continues. Simulated points all use ``spec.seed``.
    """
    analytic_rows: List[List[Dict[str, Any]]] = [[] for _ in spec.values]
    if "analytic" in spec.methods:
        if spec.workers > 1 and len(spec.values) > 1:
            with ProcessPoolExecutor(max_workers=spec.workers) as pool:
                analytic_rows = list(pool.map(_analytic_rows, [spec] * len(spec.values), spec.values))
        else:
            analytic_rows = [_analytic_rows(spec, value) for value in spec.values]

    rows: List[Dict[str, Any]] = []
    for value, computed in zip(spec.values, analytic_rows):
        rows.extend(computed)
        if "simulate" in spec.methods:
            rows.extend(_simulated_rows(spec, value))
        logger.info("%s = %g done", spec.axis, value)
    return results_frame(rows)


def results_frame(rows: Sequence[Dict[str, Any]] = ()) -> pd.DataFrame:
    frame = pd.DataFrame(list(rows), columns=list(COLUMNS))
    return frame.astype({
        "axis_name": "object", "axis_value": "float64", "metric": "object", "method": "object",
        "value": "float64", "std_error": "float64", "trials": "Int64", "seed": "Int64",
        "wall_ms": "float64",
    })


# -- result files -------------------------------------------------------------

def _rounded(value: Any) -> Any:
    if value is None or value is pd.NA:
        return None
    if isinstance(value, (float, np.floating)):
        if not math.isfinite(value):
            return None
        return float(f"{value:.{SIGNIFICANT_DIGITS}g}")
    if isinstance(value, np.integer):
        return int(value)
    return value


def _format_of(path: Path, fmt: Optional[str] = None) -> str:
    fmt = fmt or path.suffix.lstrip(".").lower()
    if fmt not in ("csv", "json"):
        raise ResultsIOError(f"{path}: unsupported result format {fmt!r} (csv or json)")
    return fmt


def write_results(table: pd.DataFrame, fmt: str, path: Union[str, Path]) -> None:
    """Write a result table as CSV or JSON with 12 significant digits.

    Raises:
        ResultsIOError: if the file cannot be written.
    """
    path = Path(path)
    fmt = _format_of(path, fmt)
    table = results_frame(table.to_dict("records")) if len(table) else results_frame()
    try:
        if fmt == "csv":
            table.to_csv(path, index=False, float_format=f"%.{SIGNIFICANT_DIGITS}g", na_rep="")
        else:
            records = [{k: _rounded(v) for k, v in row.items()}
                       for row in table.to_dict("records")]
            path.write_text(json.dumps(records, indent=1) + "\n", encoding="utf-8")
    except OSError as exc:
        raise ResultsIOError(f"{path}: cannot write results: {exc.strerror or exc}") from exc
    logger.debug("wrote %d rows to %s", len(table), path)


def read_results(path: Union[str, Path], fmt: Optional[str] = None) -> pd.DataFrame:
    """Load a table written by :func:`write_results`."""
    path = Path(path)
    fmt = _format_of(path, fmt)
    try:
        if fmt == "csv":
            frame = pd.read_csv(path, dtype={"axis_name": "object", "metric": "object",
                                             "method": "object", "trials": "Int64",
                                             "seed": "Int64"})
            return results_frame(frame.to_dict("records"))
        records = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, ValueError) as exc:
        raise ResultsIOError(f"{path}: cannot read results: {exc}") from exc
    for record in records:
        for key in ("value", "std_error", "axis_value", "wall_ms"):
            if record.get(key) is None:
                record[key] = math.nan
        for key in ("trials", "seed"):
            if record.get(key) is None:
                record[key] = pd.NA
    return results_frame(records)
