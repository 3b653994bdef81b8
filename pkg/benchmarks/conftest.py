"""
Benchmark configuration and fixtures.

Provides the timing harness and the scenarios shared by the benchmark modules.
"""

import os
import statistics
import sys
import time

sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..', 'src'))

from mmv2i.analytic import _coverage, serving_distribution
from mmv2i.config import highway_scenario


class BenchmarkRunner:
    """Utility class for running and timing benchmark functions."""

    def __init__(self, iterations=20, warmup=1, setup=None):
        self.iterations = iterations
        self.warmup = warmup
        self.setup = setup

    def run_benchmark(self, func, name="benchmark"):
        """Run a function several times and return timing statistics in ms."""
        for _ in range(self.warmup):
            if self.setup:
                self.setup()
            func()

        times = []
        result = None
        for _ in range(self.iterations):
            if self.setup:
                self.setup()
            start = time.perf_counter()
            try:
                result = func()
            except Exception as e:
                return {'name': name, 'error': str(e), 'success': False}
            times.append((time.perf_counter() - start) * 1000)

        return {
            'name': name,
            'success': True,
            'times': times,
            'mean': statistics.mean(times),
            'median': statistics.median(times),
            'stdev': statistics.stdev(times) if len(times) > 1 else 0,
            'min': min(times),
            'max': max(times),
            'result': result,
        }

    def compare_benchmarks(self, baseline_func, test_func, baseline_name="baseline", test_name="test"):
        """Compare two functions and return the speedup of ``test_func``."""
        baseline = self.run_benchmark(baseline_func, baseline_name)
        test = self.run_benchmark(test_func, test_name)
        if not (baseline['success'] and test['success']):
            return None
        speedup = baseline['mean'] / test['mean']
        return {'baseline': baseline, 'test': test, 'speedup': speedup, 'faster': speedup > 1.0}


def clear_caches():
    """Forget cached serving distributions and coverage results."""
    serving_distribution.cache_clear()
    _coverage.cache_clear()


def create_benchmark_scenarios():
    """Scenarios spanning sparse to dense deployments in both environments."""
    return {
        'urban_sparse': highway_scenario("urban", "psi30", bs_density_per_km=0.2),
        'urban_mid': highway_scenario("urban", "psi30", bs_density_per_km=10.684),
        'urban_dense': highway_scenario("urban", "psi90", bs_density_per_km=50.0),
        'rural_mid': highway_scenario("rural", "psi30", bs_density_per_km=10.684),
    }


def format_benchmark_results(comparison, title="Benchmark Results"):
    """Format a comparison for display."""
    if not comparison:
        return f"{title}: FAILED"
    baseline = comparison['baseline']
    test = comparison['test']
    return (
        f"{title}:\n"
        f"  {baseline['name']}: {baseline['mean']:.3f}ms ± {baseline['stdev']:.3f}ms\n"
        f"  {test['name']}: {test['mean']:.3f}ms ± {test['stdev']:.3f}ms\n"
        f"  Speedup: {comparison['speedup']:.2f}x"
    )


def format_timing(result, title):
    if not result['success']:
        return f"{title}: FAILED ({result['error']})"
    return f"{title}: {result['mean']:.3f}ms ± {result['stdev']:.3f}ms (min {result['min']:.3f}ms)"


def print_benchmark_summary(results_list, category="Benchmark"):
    """Print a summary of several comparisons."""
    print(f"\n{'=' * 60}")
    print(f"{category} Performance Summary")
    print(f"{'=' * 60}")
    speedups = [r['speedup'] for r in results_list if r and 'speedup' in r]
    if not speedups:
        print("No successful benchmarks")
        return
    print(f"Results: {len(speedups)}/{len(results_list)} successful")
    print(f"Average speedup: {statistics.mean(speedups):.2f}x")
    print(f"Best speedup: {max(speedups):.2f}x")
    print(f"Worst speedup: {min(speedups):.2f}x")
