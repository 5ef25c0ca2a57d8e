#!/usr/bin/env python3
"""Compare the compiled and pure-Python split-search kernels.

Fits the same seeded forest with each available backend on planted-signal
matrices of a few sizes, verifies the serialized models are identical, and
prints per-backend timings.

    python benchmarks/forest_backends.py [--rows 4000] [--cols 452] [--trees 20]
"""

import argparse
import time

import numpy as np

from crowdverdict.forest import (
    TrainConfig,
    available_backends,
    default_backend,
    fit_forest_arrays,
    serialize_forest,
)


def planted_matrix(rows: int, cols: int, seed: int = 0):
    rng = np.random.default_rng(seed)
    y = (rng.random(rows) < 0.5).astype(np.uint8)
    x = rng.normal(size=(rows, cols))
    for j, strength in ((0, 1.6), (1, 1.1), (2, 0.7)):
        x[:, j] += strength * y
    return x, y


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--rows", type=int, default=4000)
    parser.add_argument("--cols", type=int, default=452)
    parser.add_argument("--trees", type=int, default=20)
    parser.add_argument("--repeats", type=int, default=3)
    args = parser.parse_args()

    backends = available_backends()
    print(f"backends: {', '.join(backends)} (default: {default_backend()})")
    sizes = [(args.rows // 4, args.cols // 4), (args.rows // 2, args.cols), (args.rows, args.cols)]
    config = TrainConfig(n_trees=args.trees, rng_seed=7)

    for rows, cols in sizes:
        x, y = planted_matrix(rows, cols)
        timings = {}
        serialized = {}
        for backend in backends:
            best = float("inf")
            for _ in range(args.repeats):
                start = time.perf_counter()
                forest = fit_forest_arrays(x, y, config, backend=backend)
                best = min(best, time.perf_counter() - start)
            timings[backend] = best
            serialized[backend] = serialize_forest(forest)
        identical = len(set(serialized.values())) == 1
        line = f"{rows:>6} rows x {cols:>3} cols x {args.trees} trees:"
        for backend in backends:
            line += f"  {backend} {timings[backend]:7.2f}s"
        if "compiled" in timings and "python" in timings:
            line += f"  speedup {timings['python'] / timings['compiled']:5.1f}x"
        line += f"  identical_models={identical}"
        print(line)
        if not identical:
            raise SystemExit("backend outputs diverged; this is a bug")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
