"""
Scenario presets and YAML configuration files.

A config file has six sections::

    road:      num_lanes, lane_width_m, half_width_m, length_km
    network:   bs_density_per_km, carrier_freq_ghz, bandwidth_ghz,
               tx_power_dbm, sinr_threshold_db, rayleigh_mu
    mobility:  slot_s, speed_kmh
    pathloss:  model (urban|rural), preset (urban|rural), los_reference,
               alpha_los, alpha_nlos, c_los_db, c_nlos_db,
               a_los_per_m (urban), obstacle_density_per_km,
               obstacle_length_m (rural)
    antenna:   preset (psi30|psi60|psi90), bs_main_gain_db, bs_side_gain_db,
               bs_beamwidth_deg, bs_elements, vn_main_gain_db,
               vn_side_gain_db, vn_beamwidth_deg, vn_elements, theta_b_deg
    units:     preset (si|reference), kmh_per_mps, noise (consistent|mixed)

Keys carry their unit; values are converted to SI linear on load. Anything
left out takes the highway defaults below.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Any, Callable, Dict, Mapping, Optional, Tuple, Union

import yaml

from .errors import ConfigError
from .model import (
    AntennaPattern,
    LosReference,
    NoiseConvention,
    PathLossModel,
    RuralPathLoss,
    ScenarioConfig,
    UNIT_PRESETS,
    UnitConventions,
    UrbanPathLoss,
    db_to_linear,
    dbm_to_watts,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class BeamPreset:
    """BS beamwidth paired with the main-lobe gain a matching array achieves."""

    name: str
    beamwidth_deg: float
    main_gain_db: float
    elements: int

    def antenna(self, side_gain_db: float = -10.0) -> AntennaPattern:
        return AntennaPattern.from_db(self.main_gain_db, side_gain_db,
                                      self.beamwidth_deg, self.elements)


BEAM_PRESETS: Dict[str, BeamPreset] = {
    "psi30": BeamPreset("psi30", 30.0, 20.0, 64),
    "psi60": BeamPreset("psi60", 60.0, 12.0, 16),
    "psi90": BeamPreset("psi90", 90.0, 6.0, 4),
}

VN_ANTENNA = AntennaPattern.from_db(12.0, -10.0, 60.0, 16)

URBAN_PATHLOSS = UrbanPathLoss(alpha_L=2.0, alpha_N=2.92, C_L=10 ** -7.2, C_N=10 ** -6.14,
                               a_los=0.0149)
RURAL_PATHLOSS = RuralPathLoss(alpha_L=2.8, alpha_N=4.0, C_L=10 ** -6.1, C_N=10 ** -6.1,
                               lambda_o=20e-3, tau_o=11.1)

PATHLOSS_PRESETS: Dict[str, PathLossModel] = {"urban": URBAN_PATHLOSS, "rural": RURAL_PATHLOSS}


def beam_preset(name: str) -> BeamPreset:
    try:
        return BEAM_PRESETS[name]
    except KeyError:
        raise ConfigError("antenna.preset", f"unknown preset {name!r}, "
                          f"expected one of {', '.join(BEAM_PRESETS)}") from None


def unit_conventions(units: Union[str, UnitConventions]) -> UnitConventions:
    """Resolve a unit preset name (``si`` or ``reference``)."""
    if isinstance(units, UnitConventions):
        return units
    try:
        return UNIT_PRESETS[units]
    except KeyError:
        raise ConfigError("units.preset", f"unknown preset {units!r}, "
                          f"expected one of {', '.join(UNIT_PRESETS)}") from None


def highway_scenario(pathloss: Union[str, PathLossModel] = "urban", beam: str = "psi30", *,
                     bs_density_per_km: float = 10.0, slot: float = 0.3,
                     speed_kmh: float = 100.0,
                     units: Union[str, UnitConventions] = "si",
                     **overrides) -> ScenarioConfig:
    """The highway scenario with four 3.7 m lanes, 27 dBm, 1 GHz at 28 GHz.

    ``speed_kmh`` is converted under ``units``; ``overrides`` go straight to
    :class:`ScenarioConfig`.
    """
    units = unit_conventions(units)
    if isinstance(pathloss, str):
        if pathloss not in PATHLOSS_PRESETS:
            raise ConfigError("pathloss.preset", f"unknown preset {pathloss!r}")
        pathloss = PATHLOSS_PRESETS[pathloss]
    fields = dict(
        pathloss=pathloss,
        bs_antenna=beam_preset(beam).antenna(),
        vn_antenna=VN_ANTENNA,
        bs_density=bs_density_per_km / 1e3,
        slot=slot,
        speed=units.speed_from_kmh(speed_kmh),
        units=units,
    )
    fields.update(overrides)
    return ScenarioConfig.from_lanes(num_lanes=4, lane_width=3.7, **fields)


# -- YAML files ---------------------------------------------------------------

_LINES = "__lines__"


class _LineLoader(yaml.SafeLoader):
    """SafeLoader that records the line of every mapping key."""

    def construct_mapping(self, node, deep=False):
        mapping = super().construct_mapping(node, deep=deep)
        mapping[_LINES] = {key.value: key.start_mark.line + 1 for key, _ in node.value}
        return mapping


Converter = Callable[[Any], Any]


def _number(value: Any) -> float:
    # YAML 1.1 reads 1e-3 (no dot) as a string
    if isinstance(value, str):
        try:
            return float(value)
        except ValueError:
            pass
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise TypeError(f"expected a number, got {value!r}")
    return float(value)


def _integer(value: Any) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise TypeError(f"expected an integer, got {value!r}")
    return value


class _Kmh(float):
    """A speed still in km/h; converted once the unit conventions are known."""


def _text(value: Any) -> str:
    if not isinstance(value, str):
        raise TypeError(f"expected a string, got {value!r}")
    return value.lower()


# section -> key -> (internal name, converter)
_SCHEMA: Dict[str, Dict[str, Tuple[str, Converter]]] = {
    "road": {
        "num_lanes": ("num_lanes", _integer),
        "lane_width_m": ("lane_width", _number),
        "half_width_m": ("half_width", _number),
        "length_km": ("road_length", lambda v: _number(v) * 1e3),
        "length_m": ("road_length", _number),
    },
    "network": {
        "bs_density_per_km": ("bs_density", lambda v: _number(v) / 1e3),
        "bs_density_per_m": ("bs_density", _number),
        "carrier_freq_ghz": ("carrier_freq", lambda v: _number(v) * 1e9),
        "bandwidth_ghz": ("bandwidth", lambda v: _number(v) * 1e9),
        "bandwidth_hz": ("bandwidth", _number),
        "tx_power_dbm": ("tx_power", lambda v: dbm_to_watts(_number(v))),
        "tx_power_w": ("tx_power", _number),
        "sinr_threshold_db": ("sinr_threshold", lambda v: db_to_linear(_number(v))),
        "rayleigh_mu": ("rayleigh_mu", _number),
    },
    "mobility": {
        "slot_s": ("slot", _number),
        "speed_kmh": ("speed", lambda v: _Kmh(_number(v))),
        "speed_mps": ("speed", _number),
    },
    "pathloss": {
        "model": ("model", _text),
        "preset": ("preset", _text),
        "los_reference": ("los_reference", _text),
        "alpha_los": ("alpha_L", _number),
        "alpha_nlos": ("alpha_N", _number),
        "c_los_db": ("C_L", lambda v: db_to_linear(_number(v))),
        "c_nlos_db": ("C_N", lambda v: db_to_linear(_number(v))),
        "c_los": ("C_L", _number),
        "c_nlos": ("C_N", _number),
        "a_los_per_m": ("a_los", _number),
        "obstacle_density_per_km": ("lambda_o", lambda v: _number(v) / 1e3),
        "obstacle_length_m": ("tau_o", _number),
    },
    "antenna": {
        "preset": ("preset", _text),
        "bs_main_gain_db": ("bs_main", _number),
        "bs_side_gain_db": ("bs_side", _number),
        "bs_beamwidth_deg": ("bs_beamwidth", _number),
        "bs_elements": ("bs_elements", _integer),
        "vn_main_gain_db": ("vn_main", _number),
        "vn_side_gain_db": ("vn_side", _number),
        "vn_beamwidth_deg": ("vn_beamwidth", _number),
        "vn_elements": ("vn_elements", _integer),
        "theta_b_deg": ("theta_b", lambda v: math.radians(_number(v))),
    },
    "units": {
        "preset": ("preset", _text),
        "kmh_per_mps": ("kmh_per_mps", _number),
        "noise": ("noise", _text),
    },
}


def _convert_section(name: str, raw: Any, line: Optional[int]) -> Tuple[Dict[str, Any], Dict[str, int]]:
    if raw is None:
        return {}, {}
    if not isinstance(raw, dict):
        raise ConfigError(name, "must be a mapping", line)
    lines = raw.pop(_LINES, {})
    schema = _SCHEMA[name]
    out: Dict[str, Any] = {}
    where: Dict[str, int] = {}
    for key, value in raw.items():
        field = f"{name}.{key}"
        if key not in schema:
            raise ConfigError(field, "unknown key", lines.get(key))
        target, convert = schema[key]
        if target in out:
            raise ConfigError(field, f"duplicates another key setting {target}", lines.get(key))
        try:
            out[target] = convert(value)
        except (TypeError, ValueError) as exc:
            raise ConfigError(field, str(exc), lines.get(key)) from None
        where[target] = lines.get(key)
    return out, where


def _pathloss(values: Dict[str, Any], lines: Dict[str, int]) -> PathLossModel:
    model = values.get("model")
    preset = values.get("preset")
    if model is None and preset is None:
        raise ConfigError("pathloss.model", "a path-loss variant (urban or rural) is required")
    if preset is not None and preset not in PATHLOSS_PRESETS:
        raise ConfigError("pathloss.preset", f"unknown preset {preset!r}", lines.get("preset"))
    model = model or preset
    if model not in PATHLOSS_PRESETS:
        raise ConfigError("pathloss.model", f"must be urban or rural, got {model!r}",
                          lines.get("model"))
    base = PATHLOSS_PRESETS[preset] if preset is not None else None
    if base is not None and base.kind != model:
        raise ConfigError("pathloss.preset", f"preset {preset!r} is not a {model} model",
                          lines.get("preset"))
    cls = UrbanPathLoss if model == "urban" else RuralPathLoss
    extra = ("a_los",) if model == "urban" else ("lambda_o", "tau_o")
    foreign = {"lambda_o", "tau_o"} if model == "urban" else {"a_los"}
    stray = sorted(foreign & values.keys())
    if stray:
        raise ConfigError(f"pathloss.{stray[0]}", f"not used by the {model} model",
                          lines.get(stray[0]))
    kwargs = {}
    for name in ("alpha_L", "alpha_N", "C_L", "C_N") + extra:
        if name in values:
            kwargs[name] = values[name]
        elif base is not None:
            kwargs[name] = getattr(base, name)
        else:
            raise ConfigError(f"pathloss.{name}", "missing (give it or name a preset)")
    return cls(**kwargs)


def _antennas(values: Dict[str, Any]) -> Tuple[AntennaPattern, AntennaPattern]:
    preset = beam_preset(values.get("preset", "psi30"))
    bs = AntennaPattern.from_db(
        values.get("bs_main", preset.main_gain_db),
        values.get("bs_side", -10.0),
        values.get("bs_beamwidth", preset.beamwidth_deg),
        values.get("bs_elements", preset.elements),
    )
    vn = AntennaPattern.from_db(
        values.get("vn_main", 12.0),
        values.get("vn_side", -10.0),
        values.get("vn_beamwidth", 60.0),
        values.get("vn_elements", VN_ANTENNA.elements),
    )
    return bs, vn


def _units(values: Dict[str, Any], lines: Dict[str, int]) -> UnitConventions:
    base = unit_conventions(values.get("preset", "si"))
    noise = base.noise
    if "noise" in values:
        try:
            noise = NoiseConvention(values["noise"])
        except ValueError:
            raise ConfigError("units.noise", "must be consistent or mixed",
                              lines.get("noise")) from None
    try:
        return UnitConventions(kmh_per_mps=values.get("kmh_per_mps", base.kmh_per_mps),
                               noise=noise)
    except ConfigError as exc:
        raise ConfigError(exc.field, exc.constraint, lines.get("kmh_per_mps")) from None


def config_from_mapping(document: Mapping[str, Any]) -> ScenarioConfig:
    """Build a validated :class:`ScenarioConfig` from a parsed document."""
    if not isinstance(document, dict):
        raise ConfigError("<root>", "a config file must hold a mapping of sections")
    document = dict(document)
    top_lines = document.pop(_LINES, {})
    for key in document:
        if key not in _SCHEMA:
            raise ConfigError(str(key), "unknown section", top_lines.get(key))
    parsed = {name: _convert_section(name, document.get(name), top_lines.get(name))
              for name in _SCHEMA}
    values = {name: v for name, (v, _) in parsed.items()}
    lines = {name: w for name, (_, w) in parsed.items()}

    if "pathloss" not in document:
        raise ConfigError("pathloss", "a path-loss variant (urban or rural) is required")
    pathloss = _pathloss(values["pathloss"], lines["pathloss"])
    bs, vn = _antennas(values["antenna"])
    try:
        units = _units(values["units"], lines["units"])
    except ConfigError as exc:
        if exc.line is None:
            raise ConfigError(exc.field, exc.constraint, lines["units"].get("preset")) from None
        raise

    reference = values["pathloss"].get("los_reference", "road")
    try:
        los_reference = LosReference[reference.upper()]
    except KeyError:
        raise ConfigError("pathloss.los_reference", "must be road or radial",
                          lines["pathloss"].get("los_reference")) from None

    road = values["road"]
    fields: Dict[str, Any] = {}
    for section in ("network", "mobility"):
        fields.update(values[section])
    if isinstance(fields.get("speed"), _Kmh):
        fields["speed"] = units.speed_from_kmh(fields["speed"])
    if "road_length" in road:
        fields["road_length"] = road["road_length"]
    num_lanes = road.get("num_lanes", 4)
    lane_width = road.get("lane_width", 3.7)
    half_width = road.get("half_width", num_lanes * lane_width / 2)

    field_lines = {}
    for section in ("road", "network", "mobility"):
        field_lines.update({k: v for k, v in lines[section].items()})
    try:
        return ScenarioConfig(
            pathloss=pathloss,
            bs_antenna=bs,
            vn_antenna=vn,
            num_lanes=num_lanes,
            lane_width=lane_width,
            half_width=half_width,
            theta_b=values["antenna"].get("theta_b"),
            los_reference=los_reference,
            units=units,
            **fields,
        )
    except ConfigError as exc:
        if exc.line is None and exc.field in field_lines:
            raise ConfigError(exc.field, exc.constraint, field_lines[exc.field]) from None
        raise


def load_config_text(text: str) -> ScenarioConfig:
    try:
        document = yaml.load(text, Loader=_LineLoader)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        problem = getattr(exc, "problem", None) or str(exc)
        raise ConfigError("<file>", f"parse error: {problem}",
                          mark.line + 1 if mark is not None else None) from None
    if document is None:
        raise ConfigError("<file>", "empty config")
    return config_from_mapping(document)


def parse_config(path: Union[str, Path]) -> ScenarioConfig:
    """Read and validate a YAML scenario file.

    Raises:
        ConfigError: on a parse error, an unknown key, or a field that
            violates its constraint. The message carries the line when known.
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(str(path), f"cannot read config file: {exc.strerror or exc}") from None
    logger.debug("parsing config %s", path)
    return load_config_text(text)


def bundled_config(name: str) -> ScenarioConfig:
    """One of the configs shipped with the package (``urban`` or ``rural``)."""
    resource = resources.files("mmv2i").joinpath("data", f"{name}.yaml")
    if not resource.is_file():
        raise ConfigError("config", f"no bundled config named {name!r}")
    return load_config_text(resource.read_text(encoding="utf-8"))


def describe_presets() -> str:
    """Human-readable table of the beam and path-loss presets."""
    lines = ["beam presets:"]
    for p in BEAM_PRESETS.values():
        lines.append(f"  {p.name}: psi = {p.beamwidth_deg:g} deg, G_b = {p.main_gain_db:g} dB, "
                     f"{p.elements} elements, g_b = -10 dB")
    lines.append(f"  vehicle: phi = 60 deg, G_VN = 12 dB, g_VN = -10 dB, {VN_ANTENNA.elements} elements")
    lines.append("path-loss presets:")
    u, r = URBAN_PATHLOSS, RURAL_PATHLOSS
    lines.append(f"  urban: alpha_L = {u.alpha_L:g}, alpha_N = {u.alpha_N:g}, "
                 f"C_L = {u.C_L:.4g}, C_N = {u.C_N:.4g}, a_LOS = {u.a_los:g} 1/m")
    lines.append(f"  rural: alpha_L = {r.alpha_L:g}, alpha_N = {r.alpha_N:g}, "
                 f"C_L = {r.C_L:.4g}, C_N = {r.C_N:.4g}, lambda_o = {r.lambda_o * 1e3:g} /km, "
                 f"tau_o = {r.tau_o:g} m (p_LOS = {r.p_los:.4f})")
    lines.append("unit presets:")
    for name, units in UNIT_PRESETS.items():
        lines.append(f"  {name}: km/h per m/s = {units.kmh_per_mps:g}, noise = {units.noise.value}")
    return "\n".join(lines)
