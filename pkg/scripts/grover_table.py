"""Success probability of Grover search per iteration for a few marked sets.

    python scripts/grover_table.py --n 4
"""

from __future__ import annotations

import argparse

import numpy as np

from fcgate.predicate import TruthTable, marked_set
from fcgate.simulator import grover_states, optimal_iterations


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--n", type=int, default=3)
    p.add_argument("--sets", type=int, default=4, help="number of random marked sets")
    p.add_argument("--seed", type=int, default=0)
    args = p.parse_args()

    rng = np.random.default_rng(args.seed)
    N = 2**args.n
    for _ in range(args.sets):
        k = int(rng.integers(1, max(2, N // 4) + 1))
        table = TruthTable.from_marked(args.n, rng.choice(N, k, replace=False))
        marked = marked_set(table)
        best = optimal_iterations(args.n, len(marked))
        probs = [float((np.abs(psi) ** 2)[marked].sum()) for psi in grover_states(table, best + 2)]
        row = " ".join(f"{q:.4f}" for q in probs)
        print(f"marked={marked} optimal={best}: {row}")


if __name__ == "__main__":
    main()
