#!/usr/bin/env python3
"""
Analytic Evaluator Benchmarks

Times the analytic metrics per scenario point, and compares the two ways of
integrating over the serving distance and of evaluating the mean rate.
"""

import math

from conftest import (
    BenchmarkRunner,
    clear_caches,
    create_benchmark_scenarios,
    format_benchmark_results,
    format_timing,
    print_benchmark_summary,
)
from mmv2i import analytic
from mmv2i.numerics import integrate_semi_infinite


def run_point_benchmarks():
    """Time each metric from a cold cache."""
    runner = BenchmarkRunner(iterations=5, setup=clear_caches)
    print("\nPer-point evaluation (cold cache)")
    print("-" * 50)
    for name, cfg in create_benchmark_scenarios().items():
        print(f"\nScenario: {name}")
        print(format_timing(runner.run_benchmark(lambda: analytic.no_leave_probability(cfg)), "  P_NL"))
        print(format_timing(runner.run_benchmark(lambda: analytic.coverage_probability(cfg)), "  P_cov"))
        print(format_timing(runner.run_benchmark(lambda: analytic.average_throughput(cfg)), "  B"))


def run_cache_benchmarks():
    """Cold against warm coverage evaluation."""
    cold = BenchmarkRunner(iterations=5, setup=clear_caches)
    warm = BenchmarkRunner(iterations=50)
    results = []
    print("\nCoverage cache")
    print("-" * 50)
    for name, cfg in create_benchmark_scenarios().items():
        baseline = cold.run_benchmark(lambda: analytic.coverage_probability(cfg), "cold")
        test = warm.run_benchmark(lambda: analytic.coverage_probability(cfg), "warm")
        result = {'baseline': baseline, 'test': test, 'speedup': baseline['mean'] / test['mean']}
        results.append(result)
        print(format_benchmark_results(result, name))
    return results


def run_tail_benchmarks():
    """Panel doubling with an exact tail against the infinite-range transform."""
    runner = BenchmarkRunner(iterations=50)
    results = []
    print("\nNearest-BS mass integral")
    print("-" * 50)
    a = 0.0149
    for density in (0.2e-3, 10.684e-3, 50e-3):
        lam2 = 2 * density

        def pdf(x):
            return lam2 * math.exp(-a * x) * math.exp(-lam2 * (1 - math.exp(-a * x)) / a)

        floor = math.exp(-lam2 / a)

        def tail(X):
            return math.exp(-lam2 * (1 - math.exp(-a * X)) / a) - floor

        result = runner.compare_benchmarks(
            lambda: integrate_semi_infinite(pdf, 0.0),
            lambda: integrate_semi_infinite(pdf, 0.0, tail_bound=tail),
            "transform", "panels",
        )
        results.append(result)
        print(format_benchmark_results(result, f"{density * 1e3:g} BS/km"))
    return results


def run_rate_benchmarks():
    """Interpolated coverage grid against direct quadrature for E[gamma]."""
    runner = BenchmarkRunner(iterations=3, setup=clear_caches)
    results = []
    print("\nMean rate")
    print("-" * 50)
    for name, cfg in create_benchmark_scenarios().items():
        result = runner.compare_benchmarks(
            lambda: analytic.average_rate(cfg, grid_points=None),
            lambda: analytic.average_rate(cfg),
            "direct", "grid",
        )
        results.append(result)
        print(format_benchmark_results(result, name))
        if result:
            exact = result['baseline']['result']
            print(f"  relative difference: {abs(result['test']['result'] - exact) / exact:.2e}")
    return results


def main():
    run_point_benchmarks()
    results = run_cache_benchmarks() + run_tail_benchmarks() + run_rate_benchmarks()
    print_benchmark_summary(results, "Analytic")
    return results


if __name__ == "__main__":
    main()
