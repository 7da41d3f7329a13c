#!/usr/bin/env python3
"""Differential experiment: QBF reductions vs. brute-force evaluation.

Generates random covered prenex-3CNF instances, pushes each through both
team-semantics reductions (synchronous splitjunction encoding and
asynchronous dependence-atom encoding), checks the resulting team/formula
pair with the corresponding engine, and compares against direct
quantifier-tree evaluation.  Reports agreement and timing per reduction.

Usage:
    python3 scripts/qbf_differential.py --count 50 --max-vars 5 --max-clauses 6
"""

from __future__ import annotations

import argparse
import random
import statistics
import time
from dataclasses import dataclass

from teamltl.reductions import (
    QBFInstance,
    qbf_brute_force,
    reduce_qbf_async_dep,
    reduce_qbf_sync,
)
from teamltl.teamcheck import check_async, check_sync


@dataclass(frozen=True)
class ExperimentConfig:
    count: int = 50
    max_vars: int = 5
    max_clauses: int = 6
    seed: int = 0


def random_instance(rng: random.Random, cfg: ExperimentConfig) -> QBFInstance:
    """A random covered instance: every variable is planted into a distinct
    clause slot before the remaining slots are filled, so coverage holds by
    construction for any size combination."""
    n = rng.randint(1, cfg.max_vars)
    m = rng.randint(max(1, (n + 2) // 3), max(cfg.max_clauses, (n + 2) // 3))
    variables = [f"v{i}" for i in range(1, n + 1)]
    order = variables[:]
    rng.shuffle(order)
    prefix = tuple((rng.choice("EA"), v) for v in order)
    slots = [(j, k) for j in range(m) for k in range(3)]
    rng.shuffle(slots)
    grid: list[list[str | None]] = [[None] * 3 for _ in range(m)]
    for var, (j, k) in zip(variables, slots):
        grid[j][k] = var
    clauses = tuple(
        tuple(
            (cell if cell is not None else rng.choice(variables), rng.random() < 0.5)
            for cell in row
        )
        for row in grid
    )
    return QBFInstance(prefix=prefix, clauses=clauses)


def run(cfg: ExperimentConfig) -> int:
    rng = random.Random(cfg.seed)
    instances = [random_instance(rng, cfg) for _ in range(cfg.count)]
    reductions = {
        "sync": (reduce_qbf_sync, check_sync),
        "async": (reduce_qbf_async_dep, check_async),
    }
    disagreements = 0
    print(f"instances: {cfg.count}  (vars <= {cfg.max_vars}, clauses <= {cfg.max_clauses}, seed {cfg.seed})")
    print(f"{'reduction':<8} {'agree':>6} {'team size':>10} {'mean ms':>9} {'max ms':>8}")
    for name, (reduce_fn, check_fn) in reductions.items():
        agree = 0
        sizes = []
        times = []
        for q in instances:
            expected = qbf_brute_force(q)
            t0 = time.perf_counter()
            team, g = reduce_fn(q)
            got = check_fn(team, g)
            times.append((time.perf_counter() - t0) * 1000)
            sizes.append(len(team))
            if got == expected:
                agree += 1
            else:
                disagreements += 1
                print(f"  DISAGREEMENT [{name}]: {q}")
        print(
            f"{name:<8} {agree:>4}/{cfg.count:<3} {statistics.mean(sizes):>8.1f}"
            f" {statistics.mean(times):>9.2f} {max(times):>8.1f}"
        )
    return 1 if disagreements else 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--count", type=int, default=50, help="number of random instances")
    parser.add_argument("--max-vars", type=int, default=5, help="maximum quantified variables")
    parser.add_argument("--max-clauses", type=int, default=6, help="maximum clauses")
    parser.add_argument("--seed", type=int, default=0, help="PRNG seed")
    args = parser.parse_args(argv)
    cfg = ExperimentConfig(
        count=args.count, max_vars=args.max_vars, max_clauses=args.max_clauses, seed=args.seed
    )
    return run(cfg)


if __name__ == "__main__":
    raise SystemExit(main())
