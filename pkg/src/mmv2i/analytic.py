"""
Analytic evaluators: association, coverage, beam alignment and throughput.

All integrals over the serving distance are taken in the along-road
coordinate x = b(r) = sqrt(r^2 - W^2). In that coordinate the nearest-BS
density of state i is

    g_i(x) = 2 lambda_b p_i(x) exp(-2 lambda_b M_i(x)),   M_i(x) = int_0^x p_i,

which is smooth at x = 0, and the radial densities are recovered as
f_i(r) = g_i(b(r)) r / b(r).

Every semi-infinite integral against a serving density is truncated with the
exact tail exp(-2 lambda_b M_i(X)) - exp(-2 lambda_b M_i(inf)) as the bound
on the neglected mass.
"""
from __future__ import annotations

import functools
import logging
import math
from dataclasses import dataclass
from typing import Callable, Dict, Optional, Sequence, Tuple

import numpy as np
from scipy import special
from scipy.interpolate import PchipInterpolator

from .errors import DivergenceError, DomainError
from .model import (
    LinkState,
    RuralPathLoss,
    ScenarioConfig,
    equal_pathloss_distance_A,
    max_covered_distance_d,
    road_projection_b,
    state_probability,
)
from .numerics import (
    DEFAULT_QUADRATURE,
    QuadratureSpec,
    find_root_decreasing,
    integrate_finite,
    integrate_semi_infinite,
    invert_increasing,
)

logger = logging.getLogger(__name__)

STATES = (LinkState.LOS, LinkState.NLOS)

# Threshold below which P_cov(e^t - 1) ends the rate integral.
RATE_COVERAGE_FLOOR = 1e-8
RATE_GRID_POINTS = 40

# a_los * u beyond which the RADIAL LOS mass is taken as converged.
RADIAL_LOS_CUTOFF = 40.0


def _clamp_probability(value: float, what: str) -> float:
    if 0.0 <= value <= 1.0:
        return value
    excursion = -value if value < 0 else value - 1.0
    if excursion > 1e-6:
        logger.warning("%s = %.9g lies outside [0, 1] before clamping", what, value)
    return min(1.0, max(0.0, value))


# -- serving distribution -----------------------------------------------------

@dataclass(frozen=True)
class ServingDistribution:
    """Nearest-BS and serving-BS distance laws for one scenario.

    Immutable; the association probabilities are computed on first use and
    cached on the instance.
    """

    cfg: ScenarioConfig
    quadrature: QuadratureSpec = DEFAULT_QUADRATURE

    @property
    def density(self) -> float:
        return self.cfg.bs_density

    def state_probability(self, state: LinkState, x: float) -> float:
        return state_probability(self.cfg.pathloss, state, x, self.cfg.lateral_offset)

    def state_mass(self, state: LinkState, x: float) -> float:
        """M_state(x): expected state-BS count on [0, x] per unit density."""
        pl = self.cfg.pathloss
        lateral = self.cfg.lateral_offset
        if lateral == 0 or isinstance(pl, RuralPathLoss) or pl.a_los == 0:
            los = pl.los_mass(x)
        else:
            # exp(-a sqrt(u^2 + W^2)) <= exp(-a u): nothing beyond RADIAL_LOS_CUTOFF / a
            # contributes above exp(-RADIAL_LOS_CUTOFF) / a
            upper = min(x, RADIAL_LOS_CUTOFF / pl.a_los)
            los = integrate_finite(lambda u: pl.los_probability(math.hypot(u, lateral)),
                                   0.0, upper, self.quadrature.tightened(100)).value
        return los if state is LinkState.LOS else x - los

    def state_mass_limit(self, state: LinkState) -> float:
        pl = self.cfg.pathloss
        lateral = self.cfg.lateral_offset
        if isinstance(pl, RuralPathLoss):
            p_los = pl.p_los
            p_state = p_los if state is LinkState.LOS else 1.0 - p_los
            return math.inf if p_state > 0 else 0.0
        if pl.a_los == 0:
            return math.inf if state is LinkState.LOS else 0.0
        if state is LinkState.NLOS:
            return math.inf
        if lateral == 0:
            return pl.los_mass_limit
        # int_0^inf exp(-a sqrt(u^2 + W^2)) du
        return lateral * float(special.k1(pl.a_los * lateral))

    def nearest_density(self, state: LinkState, x: float) -> float:
        """g_state(x), density of the along-road offset of the nearest state BS."""
        p = self.state_probability(state, x)
        if p == 0.0:
            return 0.0
        lam2 = 2.0 * self.density
        return lam2 * p * math.exp(-lam2 * self.state_mass(state, x))

    def exclusion_offset(self, state: LinkState, x: float) -> float:
        """Half-length of the road interval that must hold no BS of the other state."""
        r = math.hypot(x, self.cfg.half_width)
        a = equal_pathloss_distance_A(self.cfg.pathloss, state, r)
        return road_projection_b(a, self.cfg.half_width, clamp=True)

    def serving_density(self, state: LinkState, x: float) -> float:
        """Along-road serving density (mass P_state)."""
        g = self.nearest_density(state, x)
        if g == 0.0:
            return 0.0
        x_ex = self.exclusion_offset(state, x)
        return math.exp(-2.0 * self.density * self.state_mass(state.other, x_ex)) * g

    def tail_mass(self, state: LinkState, x: float) -> float:
        """Exact mass of g_state beyond x; bounds any integrand <= serving_density."""
        lam2 = 2.0 * self.density
        limit = self.state_mass_limit(state)
        floor = 0.0 if math.isinf(limit) else math.exp(-lam2 * limit)
        return max(0.0, math.exp(-lam2 * self.state_mass(state, x)) - floor)

    def integrate_serving(self, state: LinkState, integrand: Callable[[float], float],
                          lo: float = 0.0, hi: float = math.inf,
                          spec: Optional[QuadratureSpec] = None) -> Tuple[float, float]:
        """(value, error) of int_lo^hi integrand(x) dx for an integrand dominated by serving_density."""
        spec = spec or self.quadrature
        if self.density == 0:
            return 0.0, 0.0
        if math.isinf(hi):
            result = integrate_semi_infinite(integrand, lo, spec,
                                             tail_bound=lambda X: self.tail_mass(state, X))
        else:
            result = integrate_finite(integrand, lo, hi, spec)
        return result.value, result.error

    def nearest_mass(self, state: LinkState) -> float:
        """Total mass of the (possibly defective) nearest-BS law of ``state``."""
        return self.integrate_serving(state, lambda x: self.nearest_density(state, x))[0]

    @functools.cached_property
    def association(self) -> Dict[LinkState, float]:
        probabilities = {}
        for state in STATES:
            value, error = self.integrate_serving(
                state, lambda x, s=state: self.serving_density(s, x))
            logger.debug("P_%s = %.12g (quadrature error %.2g)", state.name, value, error)
            probabilities[state] = _clamp_probability(value, f"P_{state.name}")
        return probabilities

    def association_probability(self, state: LinkState) -> float:
        return self.association[state]

    def serving_mass(self, state: LinkState, x_lo: float, x_hi: float) -> float:
        """Mass of the serving density of ``state`` over the road interval [x_lo, x_hi]."""
        return self.integrate_serving(state, lambda x: self.serving_density(state, x),
                                      x_lo, x_hi)[0]

    def serving_cdf(self, r: float) -> float:
        """P[serving distance <= r], normalized by the total association mass."""
        total = sum(self.association.values())
        if total == 0 or r <= self.cfg.half_width:
            return 0.0
        x = road_projection_b(r, self.cfg.half_width)
        mass = sum(self.serving_mass(s, 0.0, x) for s in STATES)
        return _clamp_probability(mass / total, "serving CDF")

    def _radial(self, along_road: Callable[[LinkState, float], float],
                state: LinkState, r: float) -> float:
        W = self.cfg.half_width
        if r <= W:
            raise DomainError(f"distance {r!r} must exceed the road half-width {W!r}")
        x = road_projection_b(r, W)
        return along_road(state, x) * r / x

    def nearest_pdf(self, state: LinkState, r: float) -> float:
        return self._radial(self.nearest_density, state, r)

    def serving_pdf(self, state: LinkState, r: float) -> float:
        return self._radial(self.serving_density, state, r)


@functools.lru_cache(maxsize=128)
def serving_distribution(cfg: ScenarioConfig,
                         spec: QuadratureSpec = DEFAULT_QUADRATURE) -> ServingDistribution:
    return ServingDistribution(cfg, spec)


def nearest_pdf(cfg: ScenarioConfig, state: LinkState, r: float) -> float:
    return serving_distribution(cfg).nearest_pdf(state, r)


def association_probability(cfg: ScenarioConfig, state: LinkState,
                            spec: QuadratureSpec = DEFAULT_QUADRATURE) -> float:
    return serving_distribution(cfg, spec).association_probability(state)


def serving_distance_pdf(cfg: ScenarioConfig, state: LinkState, r: float) -> float:
    return serving_distribution(cfg).serving_pdf(state, r)


# -- interference and coverage ------------------------------------------------

def _laplace_exponent(dist: ServingDistribution, interferer: LinkState, t: float,
                      x0: float, scale: float, spec: QuadratureSpec) -> float:
    cfg = dist.cfg
    W = cfg.half_width
    mu = cfg.rayleigh_mu
    c = cfg.pathloss.unit_gain(interferer)
    alpha = cfg.pathloss.exponent(interferer)
    outcomes = cfg.gain_distribution.outcomes

    def integrand(y: float) -> float:
        x = x0 + scale * y
        p = dist.state_probability(interferer, x)
        if p == 0.0:
            return 0.0
        base = mu * t * c * (x * x + W * W) ** (-alpha / 2)
        kernel = 0.0
        for gain, prob in outcomes:
            if prob:
                s = base * gain
                kernel += prob * s / (1.0 + s)
        return p * kernel

    result = integrate_semi_infinite(integrand, 0.0, spec)
    return 2.0 * dist.density * scale * result.value


def interference_laplace(cfg: ScenarioConfig, serving_state: LinkState,
                         interferer_state: LinkState, t: float, r: float,
                         spec: QuadratureSpec = DEFAULT_QUADRATURE) -> float:
    """E[exp(-t I)] for the interference from ``interferer_state`` BSs.

    The serving BS has state ``serving_state`` at radial distance ``r``; no
    interferer of the same state lies within ``b(r)`` along the road and none of
    the other state within ``b(A_i(r))``.
    """
    W = cfg.half_width
    if t < 0:
        raise DomainError(f"Laplace argument must be >= 0, got {t!r}")
    if r <= W:
        raise DomainError(f"distance {r!r} must exceed the road half-width {W!r}")
    if t == 0 or cfg.bs_density == 0:
        return 1.0
    dist = serving_distribution(cfg, spec)
    x_serving = road_projection_b(r, W)
    if interferer_state is serving_state:
        x0 = x_serving
    else:
        x0 = dist.exclusion_offset(serving_state, x_serving)
    exponent = _laplace_exponent(dist, interferer_state, t, x0, max(r, 1.0), spec.tightened(10))
    return math.exp(-exponent)


@dataclass(frozen=True)
class CoverageResult:
    p_cov: float
    los_term: float
    nlos_term: float
    error: float

    def term(self, state: LinkState) -> float:
        return self.los_term if state is LinkState.LOS else self.nlos_term


def coverage_threshold_t(cfg: ScenarioConfig, state: LinkState, Gamma: float, r: float) -> float:
    """Gamma r^alpha / (mu Delta_1 C): the Laplace argument for a serving link at ``r``."""
    pl = cfg.pathloss
    return Gamma * r ** pl.exponent(state) / (cfg.rayleigh_mu * cfg.aligned_gain * pl.unit_gain(state))


SLOT_WEIGHTS = ("time", "aligned")


def _slot_weight(cfg: ScenarioConfig,
                 weight: str) -> Tuple[Callable[[float], float], Tuple[float, float]]:
    """Per-offset weight of a serving BS and the road interval on which it drops below 1.

    ``time`` is the aligned fraction min(d(r), V T_S) / (V T_S) of the slot,
    ``aligned`` the indicator of d(r) > V T_S.
    """
    if weight not in SLOT_WEIGHTS:
        raise DomainError(f"unknown slot weight {weight!r}; expected one of {SLOT_WEIGHTS}")
    W = cfg.half_width
    travel = cfg.travel
    interval = covered_interval(cfg, travel) if travel > 0 else None
    if interval is None:
        return (lambda x: 1.0), (0.0, 0.0)

    def fraction(x: float) -> float:
        d = max_covered_distance_d(math.hypot(x, W), W, cfg.psi)
        if d >= travel:
            return 1.0
        return d / travel if weight == "time" else 0.0

    return fraction, (road_projection_b(interval[0], W), road_projection_b(interval[1], W))


@functools.lru_cache(maxsize=1024)
def _coverage(cfg: ScenarioConfig, Gamma: float, spec: QuadratureSpec,
              weight: Optional[str] = None) -> CoverageResult:
    if cfg.bs_density == 0:
        return CoverageResult(0.0, 0.0, 0.0, 0.0)
    dist = serving_distribution(cfg, spec)
    W = cfg.half_width
    noise = cfg.noise
    inner = spec.tightened(10)
    if weight is None:
        fraction, (x_lo, x_hi) = (lambda x: 1.0), (0.0, 0.0)
    else:
        fraction, (x_lo, x_hi) = _slot_weight(cfg, weight)
    terms = {}
    error = 0.0
    for state in STATES:
        def integrand(x: float, state=state) -> float:
            w = fraction(x)
            if w == 0.0:
                return 0.0
            g = w * dist.serving_density(state, x)
            if g == 0.0:
                return 0.0
            r = math.hypot(x, W)
            t = coverage_threshold_t(cfg, state, Gamma, r)
            value = math.exp(-noise * t) * g
            if value == 0.0:
                return 0.0
            for interferer in STATES:
                x0 = x if interferer is state else dist.exclusion_offset(state, x)
                value *= math.exp(-_laplace_exponent(dist, interferer, t, x0, max(r, 1.0), inner))
            return value

        # the weight has kinks at x_lo and x_hi
        value = 0.0
        for lo, hi in ((0.0, x_lo), (x_lo, x_hi), (x_hi, math.inf)):
            if hi > lo:
                part, err = dist.integrate_serving(state, integrand, lo, hi, spec=spec)
                value += part
                error += err
        terms[state] = _clamp_probability(value, f"P_cov {state.name} term")
    p_cov = _clamp_probability(terms[LinkState.LOS] + terms[LinkState.NLOS], "P_cov")
    return CoverageResult(p_cov, terms[LinkState.LOS], terms[LinkState.NLOS], error)


def coverage_probability(cfg: ScenarioConfig, Gamma: Optional[float] = None,
                         spec: QuadratureSpec = DEFAULT_QUADRATURE) -> CoverageResult:
    """P[SINR > Gamma], split by the state of the serving BS.

    ``Gamma`` defaults to the configured threshold.
    """
    Gamma = cfg.sinr_threshold if Gamma is None else Gamma
    if not Gamma > 0:
        raise DomainError(f"SINR threshold must be > 0, got {Gamma!r}")
    return _coverage(cfg, float(Gamma), spec)


def slot_coverage(cfg: ScenarioConfig, weight: str, Gamma: Optional[float] = None,
                  spec: QuadratureSpec = DEFAULT_QUADRATURE) -> CoverageResult:
    """E[w(r) 1{SINR > Gamma}] for a slot weight of the serving distance.

    With ``weight="aligned"`` this is the joint probability that the slot
    starts covered and the beam holds for all of it; with ``weight="time"``
    the indicator is scaled by the aligned fraction of the slot.
    """
    Gamma = cfg.sinr_threshold if Gamma is None else Gamma
    if not Gamma > 0:
        raise DomainError(f"SINR threshold must be > 0, got {Gamma!r}")
    return _coverage(cfg, float(Gamma), spec, weight)


# -- beam alignment -----------------------------------------------------------

def turning_distance(cfg: ScenarioConfig) -> float:
    """Radius W sec(psi/4) where d(r) attains its minimum 2 W tan(psi/4)."""
    return cfg.half_width / math.cos(cfg.psi / 4)


def critical_distance(cfg: ScenarioConfig) -> float:
    """r* solving r = (V T_S / sin(psi/2)) ((W/r) sin eta + sqrt(1 - (W/r)^2) cos eta).

    Searched on the increasing branch of d(r), r >= W sec(psi/4).
    """
    W = cfg.half_width
    psi = cfg.psi
    k = cfg.travel / math.sin(psi / 2)
    eta = math.pi / 2 - psi / 2
    sin_eta, cos_eta = math.sin(eta), math.cos(eta)

    def g(r: float) -> float:
        w = W / r
        return r - k * (w * sin_eta + math.sqrt(max(0.0, 1.0 - w * w)) * cos_eta)

    return find_root_decreasing(g, turning_distance(cfg), W + k + W)


def _lower_edge(cfg: ScenarioConfig, x: float) -> float:
    """Smallest r with d(r) <= x, for x no smaller than the minimum of d."""
    W = cfg.half_width
    d = lambda r: max_covered_distance_d(r, W, cfg.psi)  # noqa: E731
    if x >= d(W):
        return W
    return invert_increasing(lambda r: -d(r), -x, W, turning_distance(cfg))


def covered_interval(cfg: ScenarioConfig, x: float) -> Optional[Tuple[float, float]]:
    """Radial interval [r_a, r_b] on which d(r) <= x, or None when empty."""
    W = cfg.half_width
    psi = cfg.psi
    d = lambda r: max_covered_distance_d(r, W, psi)  # noqa: E731
    r_turn = turning_distance(cfg)
    if x < d(r_turn):
        return None
    if math.isinf(x):
        return W, math.inf
    r_b = invert_increasing(d, x, r_turn, r_turn + x / math.sin(psi / 2) + W)
    return _lower_edge(cfg, x), r_b


def _covered_mass(dist: ServingDistribution, interval: Optional[Tuple[float, float]]) -> float:
    if interval is None:
        return 0.0
    W = dist.cfg.half_width
    if math.isinf(interval[1]):
        return sum(dist.association.values())
    x_lo = road_projection_b(interval[0], W)
    x_hi = road_projection_b(interval[1], W)
    return sum(dist.serving_mass(s, x_lo, x_hi) for s in STATES)


def no_leave_probability(cfg: ScenarioConfig,
                         spec: QuadratureSpec = DEFAULT_QUADRATURE) -> float:
    """P[d(r) > V T_S]: the vehicle stays in the serving beam for the whole slot."""
    if cfg.travel == 0:
        return 1.0
    if cfg.bs_density == 0:
        return 0.0
    dist = serving_distribution(cfg, spec)
    total = sum(dist.association.values())
    r_turn = turning_distance(cfg)
    if cfg.travel < max_covered_distance_d(r_turn, cfg.half_width, cfg.psi):
        return _clamp_probability(total, "P_NL")
    r_star = critical_distance(cfg)
    left = _covered_mass(dist, (_lower_edge(cfg, cfg.travel), r_star))
    return _clamp_probability(total - left, "P_NL")


@dataclass(frozen=True)
class ConnectivityResult:
    p_c: float
    p_cov: float
    p_nl: float


def connectivity_probability(cfg: ScenarioConfig,
                             spec: QuadratureSpec = DEFAULT_QUADRATURE) -> ConnectivityResult:
    """P_C = P_cov * P_NL, with both factors."""
    p_cov = coverage_probability(cfg, spec=spec).p_cov
    p_nl = no_leave_probability(cfg, spec)
    return ConnectivityResult(p_cov * p_nl, p_cov, p_nl)


def joint_connectivity_probability(cfg: ScenarioConfig,
                                   spec: QuadratureSpec = DEFAULT_QUADRATURE) -> float:
    """P[SINR > Gamma and d(r) > V T_S] without treating the two events as independent.

    Both events depend on the serving distance; close BSs cover well but are
    left early, so this sits at or below the product P_cov * P_NL.
    """
    if cfg.travel == 0:
        return coverage_probability(cfg, spec=spec).p_cov
    return slot_coverage(cfg, "aligned", spec=spec).p_cov


def covered_distance_cdf(cfg: ScenarioConfig, x: float,
                         spec: QuadratureSpec = DEFAULT_QUADRATURE) -> float:
    """F_d(x) = P[d(r) <= x] over the serving distance."""
    if x < 0:
        raise DomainError(f"distance must be >= 0, got {x!r}")
    if cfg.bs_density == 0:
        return 0.0
    dist = serving_distribution(cfg, spec)
    return _clamp_probability(_covered_mass(dist, covered_interval(cfg, x)), "F_d")


# -- rate, communication time, throughput --------------------------------------

def rate_from_coverage(coverage: Callable[[float], float], bandwidth: float,
                       spec: QuadratureSpec = DEFAULT_QUADRATURE,
                       grid_points: Optional[int] = None,
                       floor: float = RATE_COVERAGE_FLOOR,
                       threshold: float = 0.0) -> float:
    """Mean Shannon rate from a coverage curve ``coverage(Gamma)``.

    Returns (W / ln 2) [ln(1 + G) C(G) + int_{ln(1 + G)}^inf C(e^t - 1) dt]
    with G = ``threshold``; G = 0 gives the ungated E[gamma], G > 0 the rate
    that is earned only above the threshold.

    The range ends at the first t = 2^k with coverage below ``floor``. With
    ``grid_points`` the curve is sampled on a log-spaced grid and integrated
    through a monotone cubic interpolant; otherwise adaptively.
    """
    if threshold < 0:
        raise DomainError(f"rate threshold must be >= 0, got {threshold!r}")
    t0 = math.log1p(threshold)
    t_max = max(1.0, 2.0 * t0)
    while coverage(math.expm1(t_max)) >= floor:
        t_max *= 2.0
        if t_max > 512:
            raise DivergenceError("coverage does not decay with the SINR threshold")
    head = t0 * coverage(threshold) if t0 > 0 else 0.0
    if grid_points is None:
        integral = integrate_finite(lambda t: coverage(math.expm1(t)), t0, t_max, spec).value
    else:
        span = t_max - t0
        nodes = t0 + np.concatenate(([0.0], np.geomspace(span * 1e-4, span, grid_points)))
        values = np.array([coverage(math.expm1(t)) for t in nodes])
        integral = float(PchipInterpolator(nodes, values).integrate(t0, t_max))
    return bandwidth / math.log(2.0) * max(0.0, head + integral)


def average_rate(cfg: ScenarioConfig, spec: QuadratureSpec = DEFAULT_QUADRATURE,
                 grid_points: Optional[int] = RATE_GRID_POINTS) -> float:
    """E[gamma] in bit/s, averaged over fading and the serving distance."""
    if cfg.bs_density == 0:
        return 0.0
    dist = serving_distribution(cfg, spec)

    def coverage(gamma: float) -> float:
        if gamma <= 0:
            return sum(dist.association.values())
        return coverage_probability(cfg, gamma, spec).p_cov

    return rate_from_coverage(coverage, cfg.bandwidth, spec, grid_points)


def covered_rate(cfg: ScenarioConfig, spec: QuadratureSpec = DEFAULT_QUADRATURE,
                 grid_points: Optional[int] = RATE_GRID_POINTS) -> float:
    """E[gamma 1{SINR > Gamma}]: a slot that starts below the threshold earns nothing."""
    if cfg.bs_density == 0:
        return 0.0
    return rate_from_coverage(lambda g: coverage_probability(cfg, g, spec).p_cov,
                              cfg.bandwidth, spec, grid_points,
                              threshold=cfg.sinr_threshold)


def slot_throughput(cfg: ScenarioConfig, spec: QuadratureSpec = DEFAULT_QUADRATURE,
                    grid_points: Optional[int] = RATE_GRID_POINTS) -> float:
    """E[gamma 1{SINR > Gamma} T_comm] / T_S, averaged jointly over the serving distance."""
    if cfg.bs_density == 0:
        return 0.0
    if cfg.travel == 0:
        return covered_rate(cfg, spec, grid_points)
    return rate_from_coverage(lambda g: slot_coverage(cfg, "time", g, spec).p_cov,
                              cfg.bandwidth, spec, grid_points,
                              threshold=cfg.sinr_threshold)


def mean_comm_time(cdf: Callable[[float], float], p_nl: float, speed: float, slot: float,
                   spec: QuadratureSpec = DEFAULT_QUADRATURE,
                   support_start: float = 0.0) -> float:
    """E[T_comm] = (1 - P_NL) E[d/V | d <= V T_S] + P_NL T_S for a covered-distance CDF.

    ``support_start`` is a point below which ``cdf`` vanishes.
    """
    if speed == 0:
        return slot
    travel = speed * slot
    f_travel = cdf(travel)
    if f_travel <= 0:
        return slot
    start = min(max(0.0, support_start), travel)
    area = f_travel * start
    if travel > start:
        area += integrate_finite(lambda u: f_travel - cdf(u), start, travel, spec).value
    e_leave = area / (speed * f_travel)
    value = (1.0 - p_nl) * e_leave + p_nl * slot
    return min(slot, max(0.0, value))


def expected_comm_time(cfg: ScenarioConfig, spec: QuadratureSpec = DEFAULT_QUADRATURE) -> float:
    """Expected aligned time within one slot, in seconds."""
    if cfg.speed == 0:
        return cfg.slot
    p_nl = no_leave_probability(cfg, spec)
    d_min = max_covered_distance_d(turning_distance(cfg), cfg.half_width, cfg.psi)
    return mean_comm_time(lambda u: covered_distance_cdf(cfg, u, spec), p_nl,
                          cfg.speed, cfg.slot, spec, support_start=d_min)


@dataclass(frozen=True)
class ThroughputResult:
    """Slot throughput with the factors it is usually quoted through.

    ``throughput`` averages rate and aligned time jointly over the serving
    distance; ``decoupled`` is the product E[gamma] E[T_comm] / T_S of the
    separate means.
    """

    throughput: float
    rate: float
    covered_rate: float
    comm_time: float
    slot: float

    @property
    def decoupled(self) -> float:
        return self.rate * self.comm_time / self.slot


def average_throughput(cfg: ScenarioConfig, spec: QuadratureSpec = DEFAULT_QUADRATURE,
                       grid_points: Optional[int] = RATE_GRID_POINTS) -> ThroughputResult:
    """B together with E[gamma], the gated rate and E[T_comm]."""
    return ThroughputResult(
        throughput=slot_throughput(cfg, spec, grid_points),
        rate=average_rate(cfg, spec, grid_points),
        covered_rate=covered_rate(cfg, spec, grid_points),
        comm_time=expected_comm_time(cfg, spec),
        slot=cfg.slot,
    )


# -- studies ------------------------------------------------------------------

@dataclass(frozen=True)
class DensityOptimum:
    density: float
    throughput: float
    curve: Tuple[Tuple[float, float], ...]


def optimal_density(cfg: ScenarioConfig, densities: Sequence[float],
                    spec: QuadratureSpec = DEFAULT_QUADRATURE) -> DensityOptimum:
    """Grid search for the BS density (per meter) maximizing B."""
    if not len(densities):
        raise DomainError("density grid is empty")
    curve = tuple(
        (float(lam), slot_throughput(cfg.replace(bs_density=float(lam)), spec))
        for lam in densities
    )
    best = max(curve, key=lambda point: point[1])
    return DensityOptimum(best[0], best[1], curve)


@dataclass(frozen=True)
class ThetaCalibration:
    best_theta_b: float
    candidates: Tuple[Tuple[float, float], ...]  # (theta_b, P_cov)


def calibrate_theta_b(cfg: ScenarioConfig, target: float, Gamma: Optional[float] = None,
                      spec: QuadratureSpec = DEFAULT_QUADRATURE) -> ThetaCalibration:
    """Evaluate P_cov for theta_b in {psi/2, (psi + phi)/2} and pick the one nearest ``target``."""
    psi = cfg.psi
    phi = cfg.vn_antenna.beamwidth
    candidates = []
    for theta in (psi / 2, (psi + phi) / 2):
        p_cov = coverage_probability(cfg.replace(theta_b=theta), Gamma, spec).p_cov
        candidates.append((theta, p_cov))
    best = min(candidates, key=lambda c: abs(c[1] - target))
    return ThetaCalibration(best[0], tuple(candidates))
