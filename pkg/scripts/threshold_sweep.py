#!/usr/bin/env python3
"""Sweep the repair thresholds on a synthetic world and print a grid
of precision / recall / drop counts.

The keep threshold controls how generous the first rung of the ladder
is (scores at or above it are left alone); the reassign threshold
controls how confident a unique alternative candidate must be before
an assertion is moved.  This script makes the trade-off visible:

    python scripts/threshold_sweep.py --seed 7 --shuffle-rate 0.05
    python scripts/threshold_sweep.py --name-style realistic --perturb 0.1
"""

from __future__ import annotations

import argparse
import itertools
import time

from orcidrec.linkage import link_crossref_authors
from orcidrec.quality import RepairConfig, run_repair
from orcidrec.synthworld import SynthConfig, build_world, score_repair

KEEP_GRID = [0.60, 0.65, 0.70, 0.75, 0.80]
REASSIGN_GRID = [0.80, 0.85, 0.90, 0.95]


def parse_args() -> argparse.Namespace:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--seed", type=int, default=7)
    parser.add_argument("--n-researchers", type=int, default=800)
    parser.add_argument("--n-papers", type=int, default=4000)
    parser.add_argument("--shuffle-rate", type=float, default=0.03)
    parser.add_argument("--coverage", type=float, default=1.0)
    parser.add_argument(
        "--name-style", choices=["distinct", "realistic"], default="realistic"
    )
    parser.add_argument(
        "--perturb",
        type=float,
        default=0.0,
        help="rate for each of the married/short/transliteration classes",
    )
    parser.add_argument("--no-rescue", action="store_true")
    return parser.parse_args()


def main() -> None:
    args = parse_args()
    config = SynthConfig(
        seed=args.seed,
        n_researchers=args.n_researchers,
        n_papers=args.n_papers,
        shuffle_rate=args.shuffle_rate,
        registry_coverage=args.coverage,
        name_style=args.name_style,
        married_name_rate=args.perturb,
        short_name_rate=args.perturb,
        transliteration_rate=args.perturb,
    )
    started = time.perf_counter()
    world = build_world(config)
    linked = link_crossref_authors(world.publications, world.researchers)
    print(
        f"world: seed={args.seed} researchers={args.n_researchers} "
        f"papers={args.n_papers} injected={len(world.truth.shuffles)} "
        f"built in {time.perf_counter() - started:.1f}s"
    )
    print()
    print(f"{'keep':>6} {'reassign':>9} {'precision':>10} {'recall':>8} "
          f"{'reassigned':>11} {'dropped':>8}")
    for keep, reassign in itertools.product(KEEP_GRID, REASSIGN_GRID):
        if reassign < keep:
            continue
        repair = RepairConfig(
            keep_threshold=keep,
            reassign_threshold=reassign,
            rescue_enabled=not args.no_rescue,
        )
        _, stats, outcomes = run_repair(
            world.assertions,
            world.publications,
            world.profiles,
            linked,
            world.researchers,
            repair,
        )
        report = score_repair(world.truth, outcomes)
        print(
            f"{keep:>6.2f} {reassign:>9.2f} {report.precision:>10.4f} "
            f"{report.recall:>8.4f} {stats.reassigned:>11} {stats.dropped:>8}"
        )


if __name__ == "__main__":
    main()
