"""
Domain types, unit conversions and closed-form primitives.

Internal units are SI and linear throughout: meters, seconds, hertz, watts and
plain power ratios. Decibel values only cross this boundary through
``db_to_linear`` / ``dbm_to_watts`` and the ``from_db`` constructors.
``UnitConventions`` decides how km/h figures become m/s and how kTB is
scaled in the noise term.
"""
from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass
from enum import Enum
from typing import ClassVar, Optional, Tuple

import numpy as np

from .errors import ConfigError, DomainError

BOLTZMANN = 1.381e-23  # J/K
NOISE_TEMPERATURE = 290.0  # K


# -- unit conversions ---------------------------------------------------------

def db_to_linear(x: float) -> float:
    """10^(x/10). Works for dB ratios and, with mW as the unit, dBm."""
    return 10.0 ** (x / 10.0)


def linear_to_db(x: float) -> float:
    if x <= 0:
        raise DomainError(f"cannot express non-positive value {x!r} in dB")
    return 10.0 * math.log10(x)


def dbm_to_watts(x: float) -> float:
    return db_to_linear(x) * 1e-3


def watts_to_dbm(x: float) -> float:
    return linear_to_db(x * 1e3)


def thermal_noise_watts(bandwidth: float) -> float:
    """kTB at the reference temperature."""
    return BOLTZMANN * NOISE_TEMPERATURE * bandwidth


# -- enumerations -------------------------------------------------------------

class LinkState(Enum):
    LOS = "los"
    NLOS = "nlos"

    @property
    def other(self) -> "LinkState":
        return LinkState.NLOS if self is LinkState.LOS else LinkState.LOS


class LosReference(Enum):
    """Which distance feeds the LOS probability of a BS at along-road offset x.

    ROAD uses |x| itself, RADIAL uses sqrt(x^2 + W^2).
    """

    ROAD = "road"
    RADIAL = "radial"


class NoiseConvention(Enum):
    """How kTB is scaled against the transmit power in the noise term.

    CONSISTENT divides watts by watts. MIXED expresses kTB in milliwatts while
    the transmit power stays in watts, which inflates the noise by 1e3 and is
    the convention the bundled reference series were produced with.
    """

    CONSISTENT = "consistent"
    MIXED = "mixed"

    @property
    def scale(self) -> float:
        return 1e3 if self is NoiseConvention.MIXED else 1.0


@dataclass(frozen=True)
class UnitConventions:
    """Unit handling for user-facing speeds and for the noise term.

    ``kmh_per_mps`` is the divisor applied to km/h figures (3.6 in SI).
    """

    kmh_per_mps: float = 3.6
    noise: NoiseConvention = NoiseConvention.CONSISTENT

    def __post_init__(self):
        _require_positive("units.kmh_per_mps", self.kmh_per_mps)
        if not isinstance(self.noise, NoiseConvention):
            raise ConfigError("units.noise", f"expected a NoiseConvention, got {self.noise!r}")

    def speed_from_kmh(self, kmh: float) -> float:
        return kmh / self.kmh_per_mps

    def speed_to_kmh(self, speed: float) -> float:
        return speed * self.kmh_per_mps


def _require_positive(field: str, value: float) -> None:
    if not (value > 0 and math.isfinite(value)):
        raise ConfigError(field, f"must be a finite number > 0, got {value!r}")


def _require_nonnegative(field: str, value: float) -> None:
    if not (value >= 0 and math.isfinite(value)):
        raise ConfigError(field, f"must be a finite number >= 0, got {value!r}")


SI_UNITS = UnitConventions()
REFERENCE_UNITS = UnitConventions(kmh_per_mps=3.5, noise=NoiseConvention.MIXED)
UNIT_PRESETS = {"si": SI_UNITS, "reference": REFERENCE_UNITS}


# -- path loss ----------------------------------------------------------------

@dataclass(frozen=True, kw_only=True)
class PathLossModel:
    """Power-law path loss l_i(r) = C_i r^-alpha_i for each link state.

    Concrete variants supply the LOS probability law.
    """

    kind: ClassVar[str] = "abstract"

    alpha_L: float
    alpha_N: float
    C_L: float
    C_N: float

    def __post_init__(self):
        for name in ("alpha_L", "alpha_N", "C_L", "C_N"):
            _require_positive(f"pathloss.{name}", getattr(self, name))

    def exponent(self, state: LinkState) -> float:
        return self.alpha_L if state is LinkState.LOS else self.alpha_N

    def unit_gain(self, state: LinkState) -> float:
        return self.C_L if state is LinkState.LOS else self.C_N

    def los_probability(self, r: float) -> float:
        raise NotImplementedError

    def los_probabilities(self, r: np.ndarray) -> np.ndarray:
        """Vectorized ``los_probability``."""
        raise NotImplementedError

    def los_mass(self, x: float) -> float:
        """Integral of the LOS probability over [0, x]."""
        raise NotImplementedError

    @property
    def los_mass_limit(self) -> float:
        """Limit of ``los_mass`` as x grows without bound (may be inf)."""
        raise NotImplementedError


@dataclass(frozen=True, kw_only=True)
class RuralPathLoss(PathLossModel):
    """Obstacle-lane model: a BS is LOS with the constant probability exp(-lambda_o tau_o)."""

    kind: ClassVar[str] = "rural"

    lambda_o: float
    tau_o: float

    def __post_init__(self):
        super().__post_init__()
        _require_nonnegative("pathloss.lambda_o", self.lambda_o)
        _require_nonnegative("pathloss.tau_o", self.tau_o)

    @property
    def p_los(self) -> float:
        return math.exp(-self.lambda_o * self.tau_o)

    def los_probability(self, r: float) -> float:
        return self.p_los

    def los_probabilities(self, r: np.ndarray) -> np.ndarray:
        return np.full(np.shape(r), self.p_los)

    def los_mass(self, x: float) -> float:
        return self.p_los * x

    @property
    def los_mass_limit(self) -> float:
        return math.inf if self.p_los > 0 else 0.0


@dataclass(frozen=True, kw_only=True)
class UrbanPathLoss(PathLossModel):
    """Distance-dependent blockage: p_L(r) = exp(-a_los r)."""

    kind: ClassVar[str] = "urban"

    a_los: float

    def __post_init__(self):
        super().__post_init__()
        _require_nonnegative("pathloss.a_los", self.a_los)

    def los_probability(self, r: float) -> float:
        return math.exp(-self.a_los * r)

    def los_probabilities(self, r: np.ndarray) -> np.ndarray:
        return np.exp(-self.a_los * np.asarray(r, dtype=float))

    def los_mass(self, x: float) -> float:
        if self.a_los == 0:
            return x
        return -math.expm1(-self.a_los * x) / self.a_los

    @property
    def los_mass_limit(self) -> float:
        return math.inf if self.a_los == 0 else 1.0 / self.a_los


# -- antennas -----------------------------------------------------------------

@dataclass(frozen=True, kw_only=True)
class AntennaPattern:
    """Sectored (flat-top) pattern. ``elements`` is informational only."""

    main_gain: float
    side_gain: float
    beamwidth: float
    elements: Optional[int] = None

    def __post_init__(self):
        _require_positive("antenna.side_gain", self.side_gain)
        if not self.main_gain >= self.side_gain:
            raise ConfigError("antenna.main_gain", "must be >= side_gain")
        if not 0 < self.beamwidth < math.pi:
            raise ConfigError("antenna.beamwidth", f"must lie in (0, pi) rad, got {self.beamwidth!r}")
        if self.elements is not None and self.elements < 1:
            raise ConfigError("antenna.elements", "must be >= 1")

    @classmethod
    def from_db(cls, main_gain_db: float, side_gain_db: float, beamwidth_deg: float,
                elements: Optional[int] = None) -> "AntennaPattern":
        return cls(
            main_gain=db_to_linear(main_gain_db),
            side_gain=db_to_linear(side_gain_db),
            beamwidth=math.radians(beamwidth_deg),
            elements=elements,
        )


@dataclass(frozen=True)
class GainDistribution:
    """Two-point law of the beam gain seen from an interfering BS."""

    outcomes: Tuple[Tuple[float, float], ...]

    def __post_init__(self):
        if len(self.outcomes) != 2:
            raise DomainError("a gain distribution has exactly two outcomes")
        for gain, prob in self.outcomes:
            if gain < 0 or not 0 <= prob <= 1:
                raise DomainError(f"invalid outcome (gain={gain!r}, probability={prob!r})")
        if abs(sum(p for _, p in self.outcomes) - 1.0) > 1e-12:
            raise DomainError("outcome probabilities must sum to 1")

    @property
    def mean(self) -> float:
        return sum(g * p for g, p in self.outcomes)

    def sample(self, rng, size: int):
        """Draw ``size`` gains with a numpy Generator."""
        (main, p_main), (side, _) = self.outcomes
        return np.where(rng.random(size) < p_main, main, side)


# -- scenario -----------------------------------------------------------------

@dataclass(frozen=True, kw_only=True)
class ScenarioConfig:
    """Every physical and protocol parameter of one evaluation point.

    Scalar defaults are the common highway values; ``pathloss`` and both
    antenna patterns must be given (see ``mmv2i.config`` for presets).
    ``theta_b=None`` resolves to half the BS beamwidth.
    """

    pathloss: PathLossModel
    bs_antenna: AntennaPattern
    vn_antenna: AntennaPattern
    half_width: float = 7.4
    lane_width: float = 3.7
    num_lanes: int = 4
    road_length: float = 50e3
    bs_density: float = 0.01
    carrier_freq: float = 28e9
    bandwidth: float = 1e9
    tx_power: float = dbm_to_watts(27.0)
    slot: float = 0.3
    speed: float = 100 / 3.6
    sinr_threshold: float = db_to_linear(-5.0)
    rayleigh_mu: float = 1.0
    theta_b: Optional[float] = None
    los_reference: LosReference = LosReference.ROAD
    units: UnitConventions = SI_UNITS

    def __post_init__(self):
        if not isinstance(self.pathloss, PathLossModel):
            raise ConfigError("pathloss", "a Rural or Urban path-loss variant is required")
        for name in ("half_width", "lane_width", "road_length", "carrier_freq",
                     "bandwidth", "tx_power", "slot", "sinr_threshold", "rayleigh_mu"):
            _require_positive(name, getattr(self, name))
        _require_nonnegative("bs_density", self.bs_density)
        _require_nonnegative("speed", self.speed)
        if self.num_lanes < 1:
            raise ConfigError("num_lanes", "must be >= 1")
        if self.theta_b is not None and not 0 <= self.theta_b <= math.pi:
            raise ConfigError("theta_b", "must lie in [0, pi] rad")
        if not isinstance(self.units, UnitConventions):
            raise ConfigError("units", f"expected UnitConventions, got {self.units!r}")

    @classmethod
    def from_lanes(cls, *, num_lanes: int, lane_width: float, **fields) -> "ScenarioConfig":
        """Build with W = num_lanes * lane_width / 2."""
        return cls(num_lanes=num_lanes, lane_width=lane_width,
                   half_width=num_lanes * lane_width / 2, **fields)

    def replace(self, **changes) -> "ScenarioConfig":
        return dataclasses.replace(self, **changes)

    def with_speed_kmh(self, kmh: float) -> "ScenarioConfig":
        return self.replace(speed=self.units.speed_from_kmh(kmh))

    def with_units(self, units: UnitConventions) -> "ScenarioConfig":
        """Switch conventions keeping the speed in km/h, which is how speeds are quoted."""
        return self.replace(units=units, speed=units.speed_from_kmh(self.speed_kmh))

    @property
    def speed_kmh(self) -> float:
        return self.units.speed_to_kmh(self.speed)

    @property
    def psi(self) -> float:
        return self.bs_antenna.beamwidth

    @property
    def interferer_half_beamwidth(self) -> float:
        return self.psi / 2 if self.theta_b is None else self.theta_b

    @property
    def aligned_gain(self) -> float:
        """Delta_1 = G_b * G_VN."""
        return self.bs_antenna.main_gain * self.vn_antenna.main_gain

    @property
    def gain_distribution(self) -> "GainDistribution":
        return interferer_gain_distribution(self.bs_antenna, self.vn_antenna,
                                            self.interferer_half_beamwidth)

    @property
    def noise(self) -> float:
        return normalized_noise(self)

    @property
    def lateral_offset(self) -> float:
        """Lateral distance fed to the LOS law (0 for the ROAD reference)."""
        return self.half_width if self.los_reference is LosReference.RADIAL else 0.0

    @property
    def travel(self) -> float:
        """V * T_S."""
        return self.speed * self.slot


# -- closed-form primitives ---------------------------------------------------

def normalized_noise(cfg: ScenarioConfig) -> float:
    """Thermal noise over the bandwidth divided by the transmit power.

    Under the MIXED noise convention kTB is taken in milliwatts.
    """
    return thermal_noise_watts(cfg.bandwidth) * cfg.units.noise.scale / cfg.tx_power


def los_probability(pl: PathLossModel, r: float) -> float:
    if r < 0:
        raise DomainError(f"distance must be >= 0, got {r!r}")
    return pl.los_probability(r)


def state_probability(pl: PathLossModel, state: LinkState, x: float,
                      lateral: float = 0.0) -> float:
    """Probability that a BS at along-road offset ``x`` is in ``state``."""
    distance = math.hypot(x, lateral) if lateral else abs(x)
    p_los = pl.los_probability(distance)
    return p_los if state is LinkState.LOS else 1.0 - p_los


def pathloss_gain(pl: PathLossModel, state: LinkState, r: float) -> float:
    if r <= 0:
        raise DomainError(f"path loss needs r > 0, got {r!r}")
    return pl.unit_gain(state) * r ** -pl.exponent(state)


def road_projection_b(r: float, W: float, clamp: bool = False) -> float:
    """Along-road half-interval sqrt(r^2 - W^2) covering radial distance ``r``.

    With ``clamp=True`` a radius below ``W`` maps to an empty interval (0).
    """
    if r < W:
        if clamp:
            return 0.0
        raise DomainError(f"radial distance {r!r} is below the road half-width {W!r}")
    return math.sqrt((r - W) * (r + W))


def equal_pathloss_distance_A(pl: PathLossModel, state_i: LinkState, r: float) -> float:
    """Distance at which a BS of the other state matches the path loss of ``state_i`` at ``r``."""
    if r <= 0:
        raise DomainError(f"distance must be > 0, got {r!r}")
    other = state_i.other
    log_a = (math.log(pl.unit_gain(other) / pl.unit_gain(state_i))
             + pl.exponent(state_i) * math.log(r)) / pl.exponent(other)
    return math.exp(log_a)


def max_covered_distance_d(r: float, W: float, psi: float) -> float:
    """Distance the vehicle can travel before leaving a beam aimed at it from ``r``."""
    if r < W:
        raise DomainError(f"radial distance {r!r} is below the road half-width {W!r}")
    if not 0 <= psi < math.pi:
        raise DomainError(f"beamwidth must lie in [0, pi), got {psi!r}")
    if r == 0 or psi == 0:
        return 0.0
    beta = math.pi / 2 - psi / 2 + math.acos(min(1.0, W / r))
    return r * math.sin(psi / 2) / math.sin(beta)


def interferer_gain_distribution(bs: AntennaPattern, vn: AntennaPattern,
                                 theta_b: float) -> GainDistribution:
    if not 0 <= theta_b <= math.pi:
        raise DomainError(f"theta_b must lie in [0, pi], got {theta_b!r}")
    p_main = theta_b / math.pi
    return GainDistribution((
        (bs.main_gain * vn.main_gain, p_main),
        (bs.side_gain * vn.side_gain, 1.0 - p_main),
    ))


def sinr(signal_fade: float, signal_gain: float, signal_pl: float,
         interference_sum: float, noise: float) -> float:
    if min(signal_fade, signal_gain, signal_pl, interference_sum) < 0:
        raise DomainError("SINR inputs must be non-negative")
    if noise <= 0:
        raise DomainError("noise power must be positive")
    return signal_fade * signal_gain * signal_pl / (interference_sum + noise)
