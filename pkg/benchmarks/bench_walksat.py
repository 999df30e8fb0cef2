"""Compare the compiled and pure-Python WalkSAT kernels.

    python benchmarks/bench_walksat.py --repeats 50 --max-flips 5000

Both backends run the same seeds, so the run records must agree; the
script checks that before printing timings.
"""

from __future__ import annotations

import argparse
import time

from repeatstat.rng import RngSpec
from repeatstat.walksat import WalksatConfig, available_backends, generate_random_ksat, run_experiment


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--k", type=int, default=4)
    parser.add_argument("--vars", type=int, default=50)
    parser.add_argument("--clauses", type=int, default=499)
    parser.add_argument("--repeats", type=int, default=50)
    parser.add_argument("--max-flips", type=int, default=5000)
    parser.add_argument("--seed", type=int, default=20240917)
    args = parser.parse_args()

    formula = generate_random_ksat(args.k, args.vars, args.clauses, RngSpec(args.seed).derive(0))
    cfg = WalksatConfig(0.5, args.max_flips, RngSpec(args.seed).derive(1))
    timings = {}
    outputs = {}
    for backend in available_backends():
        start = time.perf_counter()
        outputs[backend] = run_experiment(formula, cfg, args.repeats, backend=backend)
        timings[backend] = time.perf_counter() - start

    records = next(iter(outputs.values()))
    if any(out != records for out in outputs.values()):
        raise SystemExit("backends disagree on run records")
    flips = sum(r.first_success_iter or args.max_flips for r in records)
    print(f"instance: {args.k}-SAT, {args.vars} vars, {args.clauses} clauses; "
          f"{args.repeats} repeats, {flips} flips total")
    for backend, secs in timings.items():
        print(f"{backend:>7}: {secs:8.3f} s  {flips / secs / 1e6:8.2f} Mflips/s")
    if len(timings) == 2:
        print(f"speed-up: {timings['python'] / timings['cython']:.1f}x")
    else:
        print("compiled kernel not built; only the Python fallback was timed")


if __name__ == "__main__":
    main()
