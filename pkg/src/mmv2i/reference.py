"""
Published figure series shipped as CSV fixtures, and comparison reports.

A fixture is a ``bs_density_per_km,value`` table preceded by ``# key: value``
header lines naming the figure, series, metric and method, and the scenario
it was computed for: path-loss and beam presets, slot, speed and unit
conventions. ``series_speed_kmh`` records a speed that differs from the
caption when the published values were produced at another speed.
"""
from __future__ import annotations

import io
import logging
import math
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Dict, List, Mapping, Optional, Tuple, Union

import numpy as np
import pandas as pd

from .config import beam_preset, highway_scenario, unit_conventions
from .errors import ConfigError, GridMismatchError, ResultsIOError
from .model import UNIT_PRESETS, ScenarioConfig, UnitConventions
from .sweep import METRICS, SweepSpec

logger = logging.getLogger(__name__)

MATCH_TOLERANCE = 1e-9
REQUIRED_KEYS = ("figure", "series", "metric", "method")
# fixture unit -> factor into SI
UNITS = {"Gbps": 1e9, "Mbps": 1e6, "bps": 1.0}


@dataclass(frozen=True)
class ReferenceDataset:
    """One immutable figure series."""

    name: str
    figure: str
    series: str
    metric: str
    method: str
    points: Tuple[Tuple[float, float], ...]  # (BS/km, value in ``unit``)
    metadata: Mapping[str, str] = field(default_factory=dict)

    @property
    def densities(self) -> np.ndarray:
        return np.array([p[0] for p in self.points])

    @property
    def values(self) -> np.ndarray:
        return np.array([p[1] for p in self.points])

    @property
    def unit(self) -> Optional[str]:
        return self.metadata.get("unit")

    @property
    def scale(self) -> float:
        """Factor converting fixture values into SI units."""
        return UNITS[self.unit] if self.unit else 1.0

    @property
    def speed_kmh(self) -> float:
        """Speed the values were computed at; ``series_speed_kmh`` overrides the caption."""
        return float(self.metadata.get("series_speed_kmh", self.metadata.get("speed_kmh", 100.0)))

    def unit_conventions(self, units: Union[str, UnitConventions, None] = None) -> UnitConventions:
        """``units`` when given, else the ``units`` header, else SI."""
        return unit_conventions(units if units is not None else self.metadata.get("units", "si"))

    def scenario(self, base: Optional[ScenarioConfig] = None,
                 units: Union[str, UnitConventions, None] = None) -> ScenarioConfig:
        """The scenario the series was computed for.

        Without ``base``, the highway defaults of the named presets; with it,
        ``base`` with slot, speed and unit conventions taken from the header.

        Raises:
            ConfigError: if ``base`` uses another path-loss model or BS beam
                than the header names.
        """
        slot = float(self.metadata.get("slot_s", 0.3))
        conventions = self.unit_conventions(units)
        pathloss = self.metadata.get("pathloss", "urban")
        preset = self.metadata.get("preset", "psi30")
        if base is None:
            return highway_scenario(pathloss, preset, slot=slot,
                                    speed_kmh=self.speed_kmh, units=conventions)
        if base.pathloss.kind != pathloss:
            raise ConfigError(f"{self.name}.pathloss",
                              f"fixture is for the {pathloss} model, the base config "
                              f"uses {base.pathloss.kind}")
        beam = beam_preset(preset)
        if not math.isclose(math.degrees(base.psi), beam.beamwidth_deg, abs_tol=1e-9):
            raise ConfigError(f"{self.name}.preset",
                              f"fixture is for {preset} ({beam.beamwidth_deg:g} deg), the base "
                              f"config has a {math.degrees(base.psi):g} deg BS beam")
        return base.replace(slot=slot, units=conventions,
                            speed=conventions.speed_from_kmh(self.speed_kmh))

    def sweep_spec(self, base: Optional[ScenarioConfig] = None, method: Optional[str] = None,
                   units: Union[str, UnitConventions, None] = None, **options) -> SweepSpec:
        """A bs_density sweep over this series' grid."""
        return SweepSpec(base=self.scenario(base, units), axis="bs_density",
                         values=tuple(self.densities), metrics=(self.metric,),
                         method=method or self.method, **options)


def _reference_dir():
    return resources.files("mmv2i").joinpath("data", "reference")


def list_references() -> List[str]:
    """Names of the bundled fixtures, sorted."""
    return sorted(entry.name[:-4] for entry in _reference_dir().iterdir()
                  if entry.name.endswith(".csv"))


def parse_reference(text: str, name: str) -> ReferenceDataset:
    metadata: Dict[str, str] = {}
    for line in text.splitlines():
        if not line.startswith("#"):
            continue
        key, sep, value = line[1:].partition(":")
        if sep:
            metadata[key.strip()] = value.strip()
    missing = [k for k in REQUIRED_KEYS if k not in metadata]
    if missing:
        raise ConfigError(f"{name}", f"fixture header lacks {', '.join(missing)}")
    if metadata["metric"] not in METRICS:
        raise ConfigError(f"{name}.metric", f"unknown metric {metadata['metric']!r}")
    if metadata.get("unit") and metadata["unit"] not in UNITS:
        raise ConfigError(f"{name}.unit", f"unknown unit {metadata['unit']!r}")
    if metadata.get("units") and metadata["units"] not in UNIT_PRESETS:
        raise ConfigError(f"{name}.units", f"unknown unit conventions {metadata['units']!r}")
    try:
        table = pd.read_csv(io.StringIO(text), comment="#")
    except (ValueError, pd.errors.ParserError) as exc:
        raise ResultsIOError(f"{name}: malformed fixture: {exc}") from exc
    if list(table.columns) != ["bs_density_per_km", "value"]:
        raise ConfigError(f"{name}", "columns must be bs_density_per_km,value")
    points = tuple((float(x), float(y)) for x, y in table.itertuples(index=False))
    return ReferenceDataset(
        name=name,
        figure=metadata["figure"],
        series=metadata["series"],
        metric=metadata["metric"],
        method=metadata["method"],
        points=points,
        metadata=metadata,
    )


def load_reference(name_or_path: Union[str, Path]) -> ReferenceDataset:
    """Load a bundled fixture by name (``fig3a_psi30``) or any fixture file."""
    path = Path(name_or_path)
    if path.is_file():
        try:
            return parse_reference(path.read_text(encoding="utf-8"), path.stem)
        except OSError as exc:
            raise ResultsIOError(f"{path}: cannot read fixture: {exc}") from exc
    name = path.name[:-4] if path.name.endswith(".csv") else path.name
    resource = _reference_dir().joinpath(f"{name}.csv")
    if not resource.is_file():
        raise ResultsIOError(f"{name_or_path}: no such fixture file or bundled reference")
    return parse_reference(resource.read_text(encoding="utf-8"), name)


@dataclass(frozen=True)
class ComparisonReport:
    dataset: str
    metric: str
    method: str
    tolerance: float
    points: pd.DataFrame  # axis_value, reference, value, abs_delta, rel_delta

    @property
    def max_delta(self) -> float:
        deltas = self.points["abs_delta"].abs()
        if deltas.isna().any():
            return math.inf
        return float(deltas.max()) if len(deltas) else 0.0

    @property
    def worst_axis_value(self) -> Optional[float]:
        if not len(self.points):
            return None
        deltas = self.points["abs_delta"].abs().fillna(math.inf)
        return float(self.points["axis_value"].iloc[int(np.argmax(deltas.to_numpy()))])

    @property
    def passed(self) -> bool:
        return self.max_delta <= self.tolerance

    def summary(self) -> str:
        verdict = "PASS" if self.passed else "FAIL"
        text = (f"{verdict} {self.dataset} ({self.metric}, {self.method}): "
                f"max |delta| = {self.max_delta:.6g} vs tolerance {self.tolerance:g}")
        if not self.passed and self.worst_axis_value is not None:
            row = self.points.iloc[int(np.argmax(self.points["abs_delta"].abs().fillna(math.inf)))]
            text += (f"; worst at {self.worst_axis_value:g} BS/km: "
                     f"{row['value']:.6g} vs reference {row['reference']:.6g}")
        return text


def compare_to_reference(table: pd.DataFrame, dataset: ReferenceDataset, tolerance: float,
                         method: Optional[str] = None) -> ComparisonReport:
    """Match each reference point to the table row with the same density.

    No interpolation is done: every reference density must appear in the
    table's bs_density rows within 1e-9. Tolerance is absolute, in the
    fixture's unit.

    Raises:
        GridMismatchError: if reference densities are missing from ``table``.
    """
    if not tolerance >= 0:
        raise ConfigError("tolerance", "must be >= 0")
    method = method or dataset.method
    rows = table[(table["axis_name"] == "bs_density") & (table["metric"] == dataset.metric)
                 & (table["method"] == method)]
    axis = rows["axis_value"].to_numpy(dtype=float)
    values = rows["value"].to_numpy(dtype=float) / dataset.scale

    matched = []
    missing = []
    for density, reference in dataset.points:
        hits = np.flatnonzero(np.abs(axis - density) <= MATCH_TOLERANCE)
        if hits.size == 0:
            missing.append(density)
            continue
        value = float(values[hits[0]])
        delta = value - reference
        rel = delta / abs(reference) if reference != 0 else (0.0 if delta == 0 else math.inf)
        matched.append((density, reference, value, delta, rel))
    if missing:
        raise GridMismatchError(missing, dataset.name)
    points = pd.DataFrame(matched, columns=["axis_value", "reference", "value",
                                            "abs_delta", "rel_delta"])
    report = ComparisonReport(dataset.name, dataset.metric, method, tolerance, points)
    logger.info("%s", report.summary())
    return report
