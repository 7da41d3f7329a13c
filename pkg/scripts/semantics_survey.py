#!/usr/bin/env python3
"""Survey experiment: how the two team semantics behave on random inputs.

Samples random teams of ultimately periodic traces and random formulas,
then measures, over the sample:

  * how often synchronous and asynchronous verdicts differ on pure LTL
    (they can: the synchronous semantics is not flat),
  * flatness of the asynchronous semantics (verdict == all singletons),
  * the synchronous shift range prfx(T) + lcm(T) actually explored,
  * how often restricting splitjunction to disjoint splits changes the
    verdict once contradictory negation enters the formula (on
    downward-closed formulas it never does).

Usage:
    python3 scripts/semantics_survey.py --samples 400 --seed 1
"""

from __future__ import annotations

import argparse
import random
from dataclasses import dataclass

from teamltl.classical import check_trace
from teamltl.formula import (
    And,
    ContradictoryNeg,
    Eventually,
    Globally,
    NegativeLiteral,
    Next,
    PositiveLiteral,
    Release,
    Split,
    Until,
)
from teamltl.teamcheck import SplitMode, check_async, check_sync
from teamltl.traces import Team, UPTrace, lcm, prfx

POOL = ("p", "q", "r")


@dataclass(frozen=True)
class SurveyConfig:
    samples: int = 400
    max_team: int = 4
    max_depth: int = 3
    seed: int = 1


def random_trace(rng: random.Random) -> UPTrace:
    letter = lambda: frozenset(p for p in POOL if rng.random() < 0.4)
    prefix = tuple(letter() for _ in range(rng.randint(0, 2)))
    loop = tuple(letter() for _ in range(rng.randint(1, 3)))
    return UPTrace(prefix, loop)


def random_formula(rng: random.Random, depth: int, allow_neg: bool = False):
    if depth <= 0 or rng.random() < 0.2:
        name = rng.choice(POOL)
        return PositiveLiteral(name) if rng.random() < 0.6 else NegativeLiteral(name)
    ops = ["X", "F", "G", "U", "R", "&", "|"] + (["~"] if allow_neg else [])
    op = rng.choice(ops)
    if op in ("X", "F", "G", "~"):
        sub = random_formula(rng, depth - 1, allow_neg)
        return {"X": Next, "F": Eventually, "G": Globally, "~": ContradictoryNeg}[op](sub)
    lhs = random_formula(rng, depth - 1, allow_neg)
    rhs = random_formula(rng, depth - 1, allow_neg)
    return {"U": Until, "R": Release, "&": And, "|": Split}[op](lhs, rhs)


def run(cfg: SurveyConfig) -> int:
    rng = random.Random(cfg.seed)
    sync_async_differ = 0
    sync_true = async_true = 0
    flat_violations = 0
    split_mode_differ = 0
    shift_ranges = []
    for _ in range(cfg.samples):
        team = Team(random_trace(rng) for _ in range(rng.randint(1, cfg.max_team)))
        f = random_formula(rng, rng.randint(1, cfg.max_depth))
        s = check_sync(team, f)
        a = check_async(team, f)
        sync_true += s
        async_true += a
        sync_async_differ += s != a
        flat_violations += a != all(check_trace(t, f) for t in team)
        shift_ranges.append(prfx(team) + lcm(team))
        g = ContradictoryNeg(random_formula(rng, rng.randint(1, cfg.max_depth)))
        h = Split(g, g)
        covers = check_sync(team, h, split_mode=SplitMode.ALL_COVERS)
        disjoint = check_sync(team, h, split_mode=SplitMode.DISJOINT_ONLY)
        split_mode_differ += covers != disjoint
    n = cfg.samples
    print(f"samples: {n}  (teams <= {cfg.max_team} traces, depth <= {cfg.max_depth}, seed {cfg.seed})")
    print(f"sync verdict true:              {sync_true:>5}  ({100 * sync_true / n:.1f}%)")
    print(f"async verdict true:             {async_true:>5}  ({100 * async_true / n:.1f}%)")
    print(f"sync vs async differ:           {sync_async_differ:>5}  ({100 * sync_async_differ / n:.1f}%)")
    print(f"async flatness violations:      {flat_violations:>5}  (must be 0)")
    print(f"split-mode divergence with ~:   {split_mode_differ:>5}  ({100 * split_mode_differ / n:.1f}%)")
    print(f"shift range prfx+lcm:           min {min(shift_ranges)}, max {max(shift_ranges)}")
    return 1 if flat_violations else 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--samples", type=int, default=400, help="number of (team, formula) samples")
    parser.add_argument("--max-team", type=int, default=4, help="maximum traces per team")
    parser.add_argument("--max-depth", type=int, default=3, help="maximum formula depth")
    parser.add_argument("--seed", type=int, default=1, help="PRNG seed")
    args = parser.parse_args(argv)
    cfg = SurveyConfig(
        samples=args.samples, max_team=args.max_team, max_depth=args.max_depth, seed=args.seed
    )
    return run(cfg)


if __name__ == "__main__":
    raise SystemExit(main())
