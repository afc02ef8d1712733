"""Time blockwise FCG application against the dense matvec as n grows.

    python scripts/bench_fast_path.py --n-max 11 --k 1
"""

from __future__ import annotations

import argparse
import time
from dataclasses import dataclass

import numpy as np

from fcgate import linalg
from fcgate.gates import FcgSpec, fcg_matrix
from fcgate.predicate import TruthTable
from fcgate.simulator import OpCounter, SimState, apply_fcg_blockwise, apply_full


@dataclass
class BenchConfig:
    n_min: int = 4
    n_max: int = 11
    m: int = 1
    k: int = 1
    reps: int = 15
    seed: int = 0


def best_of(fn, reps):
    times = []
    for _ in range(reps):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def run(cfg: BenchConfig):
    rng = np.random.default_rng(cfg.seed)
    print(f"{'n':>3} {'dim':>6} {'mul-adds':>9} {'blockwise_us':>13} {'dense_us':>10} {'speedup':>8}")
    for n in range(cfg.n_min, cfg.n_max + 1):
        marked = rng.choice(2**n, min(cfg.k, 2**n), replace=False)
        spec = FcgSpec(n, cfg.m, TruthTable.from_marked(n, marked), linalg.random_unitary(2**cfg.m, rng))
        v = rng.standard_normal(2 ** (n + cfg.m)) + 0j
        state = SimState(n, cfg.m, v / np.linalg.norm(v))
        counter = OpCounter()
        apply_fcg_blockwise(spec, state, counter)
        dense = fcg_matrix(spec).to_dense()
        t_fast = best_of(lambda: apply_fcg_blockwise(spec, state), cfg.reps)
        t_dense = best_of(lambda: apply_full(dense, state, check_unitary=False), cfg.reps)
        print(f"{n:>3} {dense.shape[0]:>6} {counter.mul_adds:>9} {t_fast * 1e6:>13.1f} "
              f"{t_dense * 1e6:>10.1f} {t_dense / t_fast:>7.1f}x")


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    for name, default in vars(BenchConfig()).items():
        p.add_argument(f"--{name.replace('_', '-')}", type=int, default=default)
    run(BenchConfig(**vars(p.parse_args())))


if __name__ == "__main__":
    main()
