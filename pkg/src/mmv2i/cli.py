"""
Command-line front end.

    mmv2i presets
    mmv2i analytic --pathloss urban --beam psi30 --bs-density 10.684
    mmv2i simulate --config urban.yaml --trials 20000 --seed 7
    mmv2i sweep --axis bs_density --values 0.2,5,10 --metrics P_NL,P_C --out sweep.csv
    mmv2i compare --reference fig3a_psi30 --tolerance 0.02

Exit status: 0 on success, 1 when a comparison fails, 2 on any error.
"""
from __future__ import annotations

import argparse
import logging
import sys
from typing import List, Optional, Sequence

import pandas as pd

from . import __version__, analytic, config, reference, simulator, sweep
from .errors import Mmv2iError
from .model import LinkState, ScenarioConfig

logger = logging.getLogger(__name__)

DEFAULT_TOLERANCE = 0.02


def _floats(text: str) -> List[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _names(text: str) -> List[str]:
    return [v.strip() for v in text.split(",") if v.strip()]


def _add_scenario_options(parser: argparse.ArgumentParser) -> None:
    group = parser.add_argument_group("scenario")
    group.add_argument("--config", help="YAML scenario file (overrides the presets)")
    group.add_argument("--pathloss", choices=sorted(config.PATHLOSS_PRESETS), default="urban")
    group.add_argument("--beam", choices=sorted(config.BEAM_PRESETS), default="psi30")
    group.add_argument("--bs-density", type=float, metavar="PER_KM",
                       help="BS density in BS/km")
    group.add_argument("--slot", type=float, metavar="SECONDS")
    group.add_argument("--speed", type=float, metavar="KMH")
    group.add_argument("--units", choices=sorted(config.UNIT_PRESETS),
                       help="unit conventions for km/h and the noise term "
                            "(default: si, or the config file's)")


def _add_simulation_options(parser: argparse.ArgumentParser) -> None:
    group = parser.add_argument_group("simulation")
    group.add_argument("--trials", type=int, default=simulator.DEFAULT_TRIALS)
    group.add_argument("--seed", type=int, default=0)
    group.add_argument("--workers", type=int, default=1)


def _add_output_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--out", help="write the result table to this path")
    parser.add_argument("--format", choices=("csv", "json"),
                        help="result format (default: from the --out suffix, else csv)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mmv2i",
        description="Coverage, beam alignment and throughput of mmWave V2I highway links.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--log-level", default="WARNING",
                        choices=("DEBUG", "INFO", "WARNING", "ERROR"))
    commands = parser.add_subparsers(dest="command", required=True)

    commands.add_parser("presets", help="print the beam and path-loss presets")

    p = commands.add_parser("analytic", help="evaluate one scenario analytically")
    _add_scenario_options(p)
    p.add_argument("--calibrate-theta-b", type=float, metavar="TARGET",
                   help="report which interferer half-beamwidth brings P_cov closest to TARGET")

    p = commands.add_parser("simulate", help="estimate one scenario by Monte Carlo")
    _add_scenario_options(p)
    _add_simulation_options(p)

    p = commands.add_parser("sweep", help="evaluate metrics along one axis")
    _add_scenario_options(p)
    _add_simulation_options(p)
    _add_output_options(p)
    p.add_argument("--axis", choices=tuple(sweep.AXES), default="bs_density")
    p.add_argument("--values", type=_floats, required=True,
                   help="comma-separated axis values (BS/km, deg, s or km/h)")
    p.add_argument("--metrics", type=_names, default=["P_NL"],
                   help=f"comma-separated subset of {','.join(sweep.METRICS)}")
    p.add_argument("--method", choices=sweep.METHODS, default="analytic")

    p = commands.add_parser("compare", help="check sweeps against published series")
    _add_simulation_options(p)
    _add_output_options(p)
    p.add_argument("--reference", action="append", default=[],
                   help="fixture name or file; repeatable; 'all' for every bundled fixture")
    p.add_argument("--config", help="YAML scenario used as the base instead of the presets")
    p.add_argument("--units", choices=sorted(config.UNIT_PRESETS),
                   help="override the unit conventions named in each fixture")
    p.add_argument("--tolerance", type=float, default=DEFAULT_TOLERANCE,
                   help="absolute tolerance in the fixture unit")
    p.add_argument("--method", choices=("analytic", "simulate"),
                   help="only compare fixtures produced by this method")
    p.add_argument("--list", action="store_true", help="list bundled fixtures and exit")
    return parser


def scenario_from_args(args: argparse.Namespace) -> ScenarioConfig:
    if args.config:
        cfg = config.parse_config(args.config)
        if args.units:
            cfg = cfg.with_units(config.unit_conventions(args.units))
    else:
        cfg = config.highway_scenario(args.pathloss, args.beam, units=args.units or "si")
    changes = {}
    if args.bs_density is not None:
        changes["bs_density"] = args.bs_density / 1e3
    if args.slot is not None:
        changes["slot"] = args.slot
    if args.speed is not None:
        changes["speed"] = cfg.units.speed_from_kmh(args.speed)
    return cfg.replace(**changes) if changes else cfg


def _write(table: pd.DataFrame, args: argparse.Namespace) -> None:
    if args.out:
        fmt = args.format or ("json" if args.out.endswith(".json") else "csv")
        sweep.write_results(table, fmt, args.out)
    else:
        print(table.to_csv(index=False, float_format="%.12g", na_rep=""), end="")


def cmd_presets(args: argparse.Namespace) -> int:
    print(config.describe_presets())
    return 0


def cmd_analytic(args: argparse.Namespace) -> int:
    cfg = scenario_from_args(args)
    coverage = analytic.coverage_probability(cfg)
    connectivity = analytic.connectivity_probability(cfg)
    result = analytic.average_throughput(cfg)
    print(f"P_L    = {analytic.association_probability(cfg, LinkState.LOS):.6f}")
    print(f"P_N    = {analytic.association_probability(cfg, LinkState.NLOS):.6f}")
    print(f"P_cov  = {coverage.p_cov:.6f}  (LOS {coverage.los_term:.6f}, NLOS {coverage.nlos_term:.6f})")
    print(f"P_NL   = {connectivity.p_nl:.6f}")
    print(f"P_C    = {connectivity.p_c:.6f}  (joint {analytic.joint_connectivity_probability(cfg):.6f})")
    print(f"rate   = {result.rate / 1e9:.6f} Gbps  (above threshold {result.covered_rate / 1e9:.6f} Gbps)")
    print(f"T_comm = {result.comm_time:.6f} s of {result.slot:g} s")
    print(f"B      = {result.throughput / 1e9:.6f} Gbps")
    print(f"E[rate] E[T_comm] / T_S = {result.decoupled / 1e9:.6f} Gbps")
    if args.calibrate_theta_b is not None:
        calibration = analytic.calibrate_theta_b(cfg, args.calibrate_theta_b)
        for theta, p_cov in calibration.candidates:
            mark = "  <- closest" if theta == calibration.best_theta_b else ""
            print(f"theta_b = {theta:.6f} rad: P_cov = {p_cov:.6f}{mark}")
    return 0


def cmd_simulate(args: argparse.Namespace) -> int:
    cfg = scenario_from_args(args)
    estimates = simulator.run_monte_carlo(cfg, args.trials, args.seed, args.workers)
    for name, estimate in estimates.items():
        if not estimate.applicable:
            print(f"{name:<8} = n/a")
        else:
            print(f"{name:<8} = {estimate.mean:.6g} +/- {estimate.std_error:.2g}")
    return 0


def cmd_sweep(args: argparse.Namespace) -> int:
    spec = sweep.SweepSpec(
        base=scenario_from_args(args), axis=args.axis, values=tuple(args.values),
        metrics=tuple(args.metrics), method=args.method,
        trials=args.trials, seed=args.seed, workers=args.workers,
    )
    _write(sweep.run_sweep(spec), args)
    return 0


def cmd_compare(args: argparse.Namespace) -> int:
    if args.list:
        for name in reference.list_references():
            print(name)
        return 0
    names = args.reference or ["all"]
    if "all" in names:
        names = reference.list_references()
    base = config.parse_config(args.config) if args.config else None
    tables = []
    failed = 0
    for name in names:
        dataset = reference.load_reference(name)
        if args.method and dataset.method != args.method:
            continue
        spec = dataset.sweep_spec(base, units=args.units, trials=args.trials, seed=args.seed,
                                  workers=args.workers)
        table = sweep.run_sweep(spec)
        tables.append(table)
        report = reference.compare_to_reference(table, dataset, args.tolerance)
        print(report.summary())
        failed += not report.passed
    if args.out and tables:
        _write(pd.concat(tables, ignore_index=True), args)
    return 1 if failed else 0


COMMANDS = {
    "presets": cmd_presets,
    "analytic": cmd_analytic,
    "simulate": cmd_simulate,
    "sweep": cmd_sweep,
    "compare": cmd_compare,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=getattr(logging, args.log_level),
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except Mmv2iError as exc:
        print(f"mmv2i: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
