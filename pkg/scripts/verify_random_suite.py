"""Run every cross-check on a seeded batch of random FCG instances and summarize.

    python scripts/verify_random_suite.py --count 200 --seed 1
"""

from __future__ import annotations

import argparse
from collections import defaultdict

from fcgate import verify


CHECKS = {
    "lemma3": lambda s: verify.check_fcg_equals_bcg_product(s, 1e-9),
    "lemma3-desc": lambda s: verify.check_fcg_equals_bcg_product(s, 1e-9, "descending"),
    "qit": lambda s: verify.check_qit(s, 1e-12),
    "entry-formula": lambda s: verify.check_entry_formula(s, 1e-15),
    "ancilla": lambda s: verify.check_ancilla_route(s, 1e-12),
    "phase-kickback": lambda s: verify.check_phase_kickback(s.table, 1e-12),
}


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--count", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    args = p.parse_args()

    worst = defaultdict(float)
    failures = defaultdict(int)
    for spec in verify.random_fcg_specs(args.count, seed=args.seed):
        for name, check in CHECKS.items():
            r = check(spec)
            worst[name] = max(worst[name], r.max_deviation)
            failures[name] += not r.passed
    for name in CHECKS:
        print(f"{name:>15}: max deviation {worst[name]:.2e}, failures {failures[name]}/{args.count}")
    raise SystemExit(1 if any(failures.values()) else 0)


if __name__ == "__main__":
    main()
