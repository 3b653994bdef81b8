"""
Monte Carlo estimation of coverage, alignment and throughput.

A trial samples one deployment of BSs along the road around a vehicle at the
origin, associates the vehicle with the BS of largest path gain, draws
Rayleigh fading and interferer beam gains, and evaluates one slot.

Trials are grouped in fixed blocks of ``BLOCK_TRIALS``; block k draws from
child k of ``SeedSequence(seed)``. Block statistics are merged in block
order, so estimates do not depend on the number of worker processes.
"""
from __future__ import annotations

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from itertools import repeat
from typing import Dict, List, Optional, Tuple, Union

import numpy as np

from .errors import DomainError
from .model import (
    LinkState,
    RuralPathLoss,
    ScenarioConfig,
    equal_pathloss_distance_A,
    max_covered_distance_d,
    road_projection_b,
    sinr,
)

logger = logging.getLogger(__name__)

BLOCK_TRIALS = 1000
DEFAULT_TRIALS = 100_000

# Estimates returned by run_monte_carlo.
METRICS = ("P_cov", "P_NL", "P_NL_all", "P_C", "P_L", "P_N", "B", "rate", "shannon_rate")

SeedLike = Union[int, np.random.SeedSequence, np.random.Generator, None]


def _as_generator(seed: SeedLike) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def simulation_window(cfg: ScenarioConfig) -> float:
    """Road length sampled around the vehicle.

    At least the configured road length, and at least 20 times a conservative
    99th percentile of the serving distance.
    """
    if cfg.bs_density == 0:
        return cfg.road_length
    pl = cfg.pathloss
    if isinstance(pl, RuralPathLoss):
        p_strong = max(pl.p_los, 1.0 - pl.p_los)
        offset = 0.0
    else:
        p_strong = 1.0
        offset = 1.0 / pl.a_los if pl.a_los > 0 else 0.0
    q99 = math.log(100.0) / (2.0 * cfg.bs_density * p_strong) + offset + cfg.half_width
    return max(cfg.road_length, 20.0 * q99)


@dataclass(frozen=True)
class Deployment:
    """One realization of the BS process on a window centred on the vehicle."""

    x: np.ndarray        # signed along-road coordinate, meters
    side: np.ndarray     # +1 upper road side, -1 lower
    is_los: np.ndarray   # LOS marks
    half_width: float
    window: float

    def __len__(self) -> int:
        return int(self.x.size)

    @property
    def radial(self) -> np.ndarray:
        return np.hypot(self.x, self.half_width)

    def state(self, index: int) -> LinkState:
        return LinkState.LOS if self.is_los[index] else LinkState.NLOS


def _los_probabilities(cfg: ScenarioConfig, x: np.ndarray) -> np.ndarray:
    lateral = cfg.lateral_offset
    distance = np.hypot(x, lateral) if lateral else np.abs(x)
    return cfg.pathloss.los_probabilities(distance)


def sample_deployment(cfg: ScenarioConfig, rng_seed: SeedLike = None,
                      window: Optional[float] = None) -> Deployment:
    """Poisson count, uniform positions, fair-coin sides, Bernoulli LOS marks."""
    rng = _as_generator(rng_seed)
    window = simulation_window(cfg) if window is None else window
    n = int(rng.poisson(cfg.bs_density * window))
    x = rng.uniform(-window / 2, window / 2, n)
    side = np.where(rng.random(n) < 0.5, 1, -1).astype(np.int8)
    is_los = rng.random(n) < _los_probabilities(cfg, x)
    return Deployment(x=x, side=side, is_los=is_los, half_width=cfg.half_width, window=window)


def path_gains(dep: Deployment, cfg: ScenarioConfig) -> np.ndarray:
    pl = cfg.pathloss
    r = dep.radial
    return np.where(dep.is_los, pl.C_L * r ** -pl.alpha_L, pl.C_N * r ** -pl.alpha_N)


def associate(dep: Deployment, cfg: ScenarioConfig) -> Optional[int]:
    """Index of the BS with the largest path gain; None for an empty deployment.

    Ties go to the smaller radial distance, then the smaller index.
    """
    if len(dep) == 0:
        return None
    gains = path_gains(dep, cfg)
    best = np.flatnonzero(gains == gains.max())
    if best.size == 1:
        return int(best[0])
    r = dep.radial[best]
    return int(best[np.flatnonzero(r == r.min())[0]])


def measure_sinr(dep: Deployment, serving: int, cfg: ScenarioConfig,
                 rng: np.random.Generator) -> float:
    """SINR with exponential fading of mean mu on every link.

    The serving link has the aligned gain G_b G_VN; each other BS draws its
    beam gain from the interferer gain distribution.
    """
    n = len(dep)
    gains = path_gains(dep, cfg)
    fades = rng.exponential(cfg.rayleigh_mu, n)
    beams = cfg.gain_distribution.sample(rng, n)
    received = fades * beams * gains
    interference = float(received.sum() - received[serving])
    return sinr(float(fades[serving]), cfg.aligned_gain, float(gains[serving]),
                max(0.0, interference), cfg.noise)


@dataclass(frozen=True)
class TrialRecord:
    serving_index: Optional[int]
    serving_state: Optional[LinkState]
    serving_distance: float
    sinr: float
    covered: bool
    shannon_rate: float
    rate: float
    d_r: float
    t_comm: float
    throughput: float
    aligned: bool

    @classmethod
    def unserved(cls) -> "TrialRecord":
        return cls(None, None, math.inf, 0.0, False, 0.0, 0.0, 0.0, 0.0, 0.0, False)


def simulate_slot(dep: Deployment, serving: Optional[int], cfg: ScenarioConfig,
                  rng: np.random.Generator) -> TrialRecord:
    """Evaluate one slot: coverage, alignment time and throughput.

    ``shannon_rate`` is W log2(1 + SINR) whatever the SINR; ``rate`` is zero
    for a slot that starts below the threshold.
    """
    if serving is None:
        return TrialRecord.unserved()
    value = measure_sinr(dep, serving, cfg, rng)
    covered = value > cfg.sinr_threshold
    r = float(dep.radial[serving])
    d_r = max_covered_distance_d(r, cfg.half_width, cfg.psi)
    t_comm = cfg.slot if cfg.speed == 0 else min(d_r / cfg.speed, cfg.slot)
    shannon_rate = cfg.bandwidth * math.log2(1.0 + value)
    rate = shannon_rate if covered else 0.0
    return TrialRecord(
        serving_index=serving,
        serving_state=dep.state(serving),
        serving_distance=r,
        sinr=value,
        covered=covered,
        shannon_rate=shannon_rate,
        rate=rate,
        d_r=d_r,
        t_comm=t_comm,
        throughput=rate * t_comm / cfg.slot,
        aligned=cfg.travel == 0 or d_r > cfg.travel,
    )


def run_trial(cfg: ScenarioConfig, rng: np.random.Generator,
              window: Optional[float] = None) -> TrialRecord:
    dep = sample_deployment(cfg, rng, window)
    return simulate_slot(dep, associate(dep, cfg), cfg, rng)


@dataclass(frozen=True)
class MetricEstimate:
    """A value with provenance; for Monte Carlo, also its standard error."""

    mean: float
    std_error: float
    trials: int
    provenance: str = "monte-carlo"
    applicable: bool = True

    @classmethod
    def analytic(cls, value: float) -> "MetricEstimate":
        return cls(value, 0.0, 0, "analytic")

    @classmethod
    def not_applicable(cls) -> "MetricEstimate":
        return cls(math.nan, math.nan, 0, "monte-carlo", applicable=False)


# (count, mean, sum of squared deviations)
Moments = Tuple[int, float, float]


def _moments(values: np.ndarray) -> Moments:
    n = int(values.size)
    if n == 0:
        return 0, 0.0, 0.0
    mean = float(values.mean())
    return n, mean, float(((values - mean) ** 2).sum())


def _merge(a: Moments, b: Moments) -> Moments:
    n_a, mean_a, m2_a = a
    n_b, mean_b, m2_b = b
    n = n_a + n_b
    if n == 0:
        return 0, 0.0, 0.0
    delta = mean_b - mean_a
    mean = mean_a + delta * n_b / n
    return n, mean, m2_a + m2_b + delta * delta * n_a * n_b / n


def _estimate(moments: Moments) -> MetricEstimate:
    n, mean, m2 = moments
    if n == 0:
        return MetricEstimate.not_applicable()
    if n == 1:
        return MetricEstimate(mean, math.inf, 1)
    return MetricEstimate(mean, math.sqrt(max(0.0, m2) / (n - 1) / n), n)


def _run_block(cfg: ScenarioConfig, seed: np.random.SeedSequence, trials: int,
               window: Optional[float]) -> Dict[str, Moments]:
    rng = np.random.default_rng(seed)
    records: List[TrialRecord] = [run_trial(cfg, rng, window) for _ in range(trials)]
    covered = np.array([t.covered for t in records], dtype=float)
    aligned = np.array([t.aligned for t in records], dtype=float)
    los = np.array([t.serving_state is LinkState.LOS for t in records], dtype=float)
    nlos = np.array([t.serving_state is LinkState.NLOS for t in records], dtype=float)
    return {
        "P_cov": _moments(covered),
        "P_NL": _moments(aligned[covered > 0]),
        "P_NL_all": _moments(aligned),
        "P_C": _moments(covered * aligned),
        "P_L": _moments(los),
        "P_N": _moments(nlos),
        "B": _moments(np.array([t.throughput for t in records])),
        "rate": _moments(np.array([t.rate for t in records])),
        "shannon_rate": _moments(np.array([t.shannon_rate for t in records])),
    }


def _blocks(trials: int) -> List[int]:
    full, rest = divmod(trials, BLOCK_TRIALS)
    return [BLOCK_TRIALS] * full + ([rest] if rest else [])


def run_monte_carlo(cfg: ScenarioConfig, trials: int = DEFAULT_TRIALS, seed: int = 0,
                    workers: int = 1, window: Optional[float] = None) -> Dict[str, MetricEstimate]:
    """Estimate every metric in ``METRICS`` from ``trials`` independent slots.

    ``P_NL`` is conditional on coverage; ``P_NL_all`` counts all trials.
    """
    if trials < 1:
        raise DomainError(f"trials must be >= 1, got {trials!r}")
    sizes = _blocks(trials)
    children = np.random.SeedSequence(seed).spawn(len(sizes))
    if workers > 1 and len(sizes) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            tallies = list(pool.map(_run_block, repeat(cfg), children, sizes, repeat(window)))
    else:
        tallies = []
        for index, (child, size) in enumerate(zip(children, sizes)):
            tallies.append(_run_block(cfg, child, size, window))
            logger.debug("block %d/%d done", index + 1, len(sizes))
    merged = {name: (0, 0.0, 0.0) for name in METRICS}
    for tally in tallies:
        for name in METRICS:
            merged[name] = _merge(merged[name], tally[name])
    return {name: _estimate(merged[name]) for name in METRICS}


def interference_samples(cfg: ScenarioConfig, serving_state: LinkState,
                         interferer_state: LinkState, r: float, draws: int,
                         seed: SeedLike = 0, window: Optional[float] = None) -> np.ndarray:
    """Draws of the aggregate interference from ``interferer_state`` BSs.

    The serving BS is taken to be of ``serving_state`` at radial distance
    ``r``, so interferers are sampled only outside the road interval that
    association keeps empty.
    """
    W = cfg.half_width
    if r <= W:
        raise DomainError(f"distance {r!r} must exceed the road half-width {W!r}")
    rng = _as_generator(seed)
    window = simulation_window(cfg) if window is None else window
    x_serving = road_projection_b(r, W)
    if interferer_state is serving_state:
        x0 = x_serving
    else:
        x0 = road_projection_b(equal_pathloss_distance_A(cfg.pathloss, serving_state, r), W,
                               clamp=True)
    pl = cfg.pathloss
    c = pl.unit_gain(interferer_state)
    alpha = pl.exponent(interferer_state)
    want_los = interferer_state is LinkState.LOS
    expected = cfg.bs_density * window
    chunk = max(1, int(2_000_000 // max(1.0, expected)))
    out = np.empty(draws)
    for start in range(0, draws, chunk):
        m = min(chunk, draws - start)
        counts = rng.poisson(expected, m)
        owner = np.repeat(np.arange(m), counts)
        x = rng.uniform(-window / 2, window / 2, owner.size)
        is_los = rng.random(owner.size) < _los_probabilities(cfg, x)
        keep = (is_los == want_los) & (np.abs(x) >= x0)
        k = int(keep.sum())
        power = (rng.exponential(cfg.rayleigh_mu, k) * cfg.gain_distribution.sample(rng, k)
                 * c * np.hypot(x[keep], W) ** -alpha)
        out[start:start + m] = np.bincount(owner[keep], weights=power, minlength=m)
    return out
