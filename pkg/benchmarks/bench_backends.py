"""Compare the numba and pure-numpy kernel backends.

Usage: python3 benchmarks/bench_backends.py [--repeat N] [--seed S]

Each kernel runs once per backend to absorb JIT compilation, then the best
of ``--repeat`` timed runs is reported.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from vnfca import kernels
from vnfca.model import CapacityModel, CobbDouglas
from vnfca.solver import OracleConfig, SolverConfig, brute_force_oracle, solve_general


def best_of(fn, repeat: int) -> float:
    fn()
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def cases(rng):
    b33 = rng.integers(1, 11, size=(3, 3)).astype(float)
    b84 = rng.uniform(1.0, 10.0, size=(8, 4))
    v = rng.normal(size=(2000, 8))
    return [
        ("projection 2000x8", lambda be: kernels.project_rows(v, backend=be)),
        ("projected gradient 3x3", lambda be: solve_general(
            CapacityModel.from_matrix(b33), CobbDouglas.equal(3), SolverConfig(backend=be))),
        ("projected gradient 8x4", lambda be: solve_general(
            CapacityModel.from_matrix(b84), CobbDouglas.equal(4), SolverConfig(backend=be))),
        ("oracle 3x3 step 0.05", lambda be: brute_force_oracle(
            CapacityModel.from_matrix(b33), CobbDouglas.equal(3), OracleConfig(0.05, backend=be))),
    ]


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=3)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args(argv)

    backends = ["numpy"] + (["numba"] if kernels.HAS_NUMBA else [])
    print(f"{'kernel':<26}" + "".join(f"{b:>12}" for b in backends) + f"{'speedup':>10}")
    for name, fn in cases(np.random.default_rng(args.seed)):
        t = {be: best_of(lambda: fn(be), args.repeat) for be in backends}
        row = f"{name:<26}" + "".join(f"{t[be]:>11.4f}s" for be in backends)
        if "numba" in t:
            row += f"{t['numpy'] / t['numba']:>9.1f}x"
        print(row)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
