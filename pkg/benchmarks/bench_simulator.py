#!/usr/bin/env python3
"""
Monte Carlo Simulator Benchmarks

Measures trial throughput and the speedup from running blocks in worker
processes.
"""

import os

from conftest import (
    BenchmarkRunner,
    create_benchmark_scenarios,
    format_benchmark_results,
    format_timing,
    print_benchmark_summary,
)
from mmv2i import simulator

TRIALS = 20_000


def run_trial_rate_benchmarks():
    """Trials per second on one core."""
    runner = BenchmarkRunner(iterations=3, warmup=0)
    print(f"\nSerial throughput ({TRIALS:,} trials)")
    print("-" * 50)
    for name, cfg in create_benchmark_scenarios().items():
        result = runner.run_benchmark(lambda: simulator.run_monte_carlo(cfg, TRIALS, seed=1), name)
        print(format_timing(result, name))
        if result['success']:
            print(f"  {TRIALS / (result['mean'] / 1000):,.0f} trials/s")


def run_worker_benchmarks():
    """Serial against parallel blocks."""
    runner = BenchmarkRunner(iterations=3, warmup=0)
    workers = min(4, os.cpu_count() or 1)
    results = []
    print(f"\nWorker speedup ({workers} processes)")
    print("-" * 50)
    for name, cfg in create_benchmark_scenarios().items():
        result = runner.compare_benchmarks(
            lambda: simulator.run_monte_carlo(cfg, TRIALS, seed=1, workers=1),
            lambda: simulator.run_monte_carlo(cfg, TRIALS, seed=1, workers=workers),
            "serial", f"{workers} workers",
        )
        results.append(result)
        print(format_benchmark_results(result, name))
        if result:
            same = result['baseline']['result'] == result['test']['result']
            print(f"  identical estimates: {same}")
    return results


def main():
    run_trial_rate_benchmarks()
    results = run_worker_benchmarks()
    print_benchmark_summary(results, "Simulator")
    return results


if __name__ == "__main__":
    main()
