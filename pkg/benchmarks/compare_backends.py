"""Time the numba kernels against the pure-numpy fallback.

The backend is chosen at import time from AMC_BACKEND, so each backend
runs in a child process and the parent compares prices and wall times.

Usage: python benchmarks/compare_backends.py [--paths N] [--iterations n] [--repeats R]
"""
from __future__ import annotations

import argparse
import json
import os
import subprocess
import sys
import time


def run_workload(paths: int, iterations: int, repeats: int) -> dict:
    from amcengine import (
        BasisSpec,
        ExerciseSchedule,
        IterationPlan,
        MarketParams,
        PutPayoff,
        WeightScheme,
        price_parallel,
    )
    from amcengine.kernels import active_backend

    params = MarketParams(spot=36.0, rate=0.06, vol=0.2)
    payoff = PutPayoff(strike=40.0)
    schedule = ExerciseSchedule.from_dates_per_year(1.0, 50)
    plan = IterationPlan(paths, iterations)
    basis = BasisSpec.blocked(schedule.n_dates, 10)

    # First run pays any JIT compilation; time the later ones.
    result = price_parallel(params, payoff, schedule, plan, WeightScheme(), basis, seed=0, keep_trace=False)
    walls = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        result = price_parallel(
            params, payoff, schedule, plan, WeightScheme(), basis, seed=0, keep_trace=False
        )
        walls.append(time.perf_counter() - t0)
    return {
        "backend": active_backend(),
        "price": result.price,
        "standard_error": result.standard_error,
        "best_wall_s": min(walls),
        "mean_wall_s": sum(walls) / len(walls),
    }


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--paths", type=int, default=100_000)
    parser.add_argument("--iterations", type=int, default=100)
    parser.add_argument("--repeats", type=int, default=3)
    parser.add_argument("--child", action="store_true", help=argparse.SUPPRESS)
    args = parser.parse_args()

    if args.child:
        print(json.dumps(run_workload(args.paths, args.iterations, args.repeats)))
        return 0

    reports = {}
    for backend in ("numba", "numpy"):
        env = dict(os.environ, AMC_BACKEND=backend)
        proc = subprocess.run(
            [
                sys.executable,
                os.path.abspath(__file__),
                "--child",
                f"--paths={args.paths}",
                f"--iterations={args.iterations}",
                f"--repeats={args.repeats}",
            ],
            env=env,
            capture_output=True,
            text=True,
        )
        if proc.returncode != 0:
            sys.stderr.write(f"{backend} backend failed:\n{proc.stderr}")
            continue
        reports[backend] = json.loads(proc.stdout.strip().splitlines()[-1])

    if not reports:
        return 1
    print(f"{'backend':>8} {'price':>10} {'s.e.':>8} {'best s':>9} {'mean s':>9}")
    for backend, r in reports.items():
        print(
            f"{backend:>8} {r['price']:>10.4f} {r['standard_error']:>8.4f} "
            f"{r['best_wall_s']:>9.3f} {r['mean_wall_s']:>9.3f}"
        )
    if len(reports) == 2:
        a, b = reports["numba"], reports["numpy"]
        diff = abs(a["price"] - b["price"])
        print(f"price difference: {diff:.2e} (statistically identical streams)")
        print(f"numpy/numba wall ratio: {b['best_wall_s'] / a['best_wall_s']:.1f}x")
    return 0


if __name__ == "__main__":
    sys.exit(main())
