#!/usr/bin/env python3
"""
Benchmark Runner

Runs every benchmark module and writes a timestamped summary under
benchmarks/results/.
"""

import os
import sys
import time
from datetime import datetime

sys.path.insert(0, os.path.dirname(__file__))

BENCHMARK_MODULES = [
    "bench_analytic",
    "bench_simulator",
]


def run_benchmark_module(module_name):
    """Import and run a benchmark module."""
    print(f"Running {module_name}...")
    print("=" * 60)
    start = time.time()
    try:
        module = __import__(module_name)
        results = module.main()
    except Exception as e:
        print(f"Error running {module_name}: {e}")
        return False, [], time.time() - start
    duration = time.time() - start
    print(f"{module_name} completed in {duration:.2f} seconds\n")
    return True, results, duration


def save_results_to_file(module_results):
    """Write the comparisons of every module to a text file."""
    os.makedirs(os.path.join(os.path.dirname(__file__), "results"), exist_ok=True)
    path = os.path.join(os.path.dirname(__file__), "results",
                        f"benchmark_results_{datetime.now().strftime('%Y%m%d_%H%M%S')}.txt")
    with open(path, 'w') as f:
        f.write(f"mmv2i Benchmark Results - {datetime.now()}\n")
        f.write("=" * 80 + "\n\n")
        for module_name, (success, results, duration) in module_results.items():
            f.write(f"{module_name}: {'SUCCESS' if success else 'FAILED'} ({duration:.2f}s)\n")
            for result in results or []:
                if not result:
                    continue
                baseline, test = result['baseline'], result['test']
                f.write(f"  {baseline['name']}: {baseline['mean']:.3f}ms ± {baseline['stdev']:.3f}ms"
                        f" | {test['name']}: {test['mean']:.3f}ms ± {test['stdev']:.3f}ms"
                        f" | speedup {result['speedup']:.2f}x\n")
    print(f"Detailed results saved to {path}")
    return path


def main():
    print("mmv2i Benchmark Suite")
    print("=" * 80)
    print(f"Started at: {datetime.now().strftime('%Y-%m-%d %H:%M:%S')}\n")
    module_results = {name: run_benchmark_module(name) for name in BENCHMARK_MODULES}
    for name, (success, results, duration) in module_results.items():
        status = "PASS" if success else "FAIL"
        print(f"{name:<20} {status} ({len(results or [])} comparisons, {duration:.2f}s)")
    save_results_to_file(module_results)
    return 0 if all(success for success, _, _ in module_results.values()) else 1


if __name__ == "__main__":
    sys.exit(main())
