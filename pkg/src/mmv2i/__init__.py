"""
mmv2i: coverage, beam alignment and throughput of mmWave V2I highway links

Usage:
    from mmv2i import highway_scenario, connectivity_probability, run_monte_carlo

    cfg = highway_scenario("urban", "psi30", bs_density_per_km=10.684)
    result = connectivity_probability(cfg)   # P_C, P_cov, P_NL
    estimates = run_monte_carlo(cfg, trials=20_000, seed=1)
    estimates["P_cov"].mean, estimates["P_cov"].std_error

    # Command line
    mmv2i compare --reference fig3a_psi30
"""
__version__ = "0.1.0"

from .analytic import (
    association_probability,
    average_rate,
    average_throughput,
    calibrate_theta_b,
    connectivity_probability,
    coverage_probability,
    covered_distance_cdf,
    covered_rate,
    expected_comm_time,
    interference_laplace,
    joint_connectivity_probability,
    nearest_pdf,
    no_leave_probability,
    optimal_density,
    serving_distance_pdf,
    slot_coverage,
    slot_throughput,
)
from .config import BEAM_PRESETS, RURAL_PATHLOSS, URBAN_PATHLOSS, highway_scenario, parse_config
from .errors import (
    ConfigError,
    DivergenceError,
    DomainError,
    GridMismatchError,
    Mmv2iError,
    QuadratureError,
    ResultsIOError,
    RootNotBracketedError,
)
from .model import (
    AntennaPattern,
    LinkState,
    LosReference,
    NoiseConvention,
    REFERENCE_UNITS,
    RuralPathLoss,
    SI_UNITS,
    ScenarioConfig,
    UnitConventions,
    UrbanPathLoss,
)
from .numerics import QuadratureSpec
from .reference import compare_to_reference, list_references, load_reference
from .simulator import MetricEstimate, run_monte_carlo
from .sweep import SweepSpec, read_results, run_sweep, write_results

__all__ = [
    'AntennaPattern', 'BEAM_PRESETS', 'ConfigError', 'DivergenceError', 'DomainError',
    'GridMismatchError', 'LinkState', 'LosReference', 'MetricEstimate', 'Mmv2iError',
    'NoiseConvention', 'QuadratureError', 'QuadratureSpec', 'REFERENCE_UNITS',
    'RURAL_PATHLOSS', 'ResultsIOError', 'RootNotBracketedError', 'RuralPathLoss',
    'SI_UNITS', 'ScenarioConfig', 'SweepSpec', 'URBAN_PATHLOSS', 'UnitConventions',
    'UrbanPathLoss', 'association_probability', 'average_rate', 'average_throughput',
    'calibrate_theta_b', 'compare_to_reference', 'connectivity_probability',
    'coverage_probability', 'covered_distance_cdf', 'covered_rate', 'expected_comm_time',
    'highway_scenario', 'interference_laplace', 'joint_connectivity_probability',
    'list_references', 'load_reference', 'nearest_pdf', 'no_leave_probability',
    'optimal_density', 'parse_config', 'read_results', 'run_monte_carlo', 'run_sweep',
    'serving_distance_pdf', 'slot_coverage', 'slot_throughput', 'write_results',
]
