#!/usr/bin/env python3
"""Audit capped runs of the proposal process against the per-entity
asymptotic bounds (proposals per girl, runs per boy, run lengths, per-pair
repeats, fresh-proposal floors) and aggregate pass rates across seeds."""

import argparse
import json

from stablematch.harness import ExperimentConfig, run_experiment, write_outputs


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=1024)
    ap.add_argument("--delta", type=float, default=0.3)
    ap.add_argument("--trials", type=int, default=20)
    ap.add_argument("--seed", type=int, default=20260808)
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--out", default="results/lemma_audit")
    args = ap.parse_args()
    config = ExperimentConfig(
        kind="lemma_audit",
        n=args.n,
        trials=args.trials,
        master_seed=args.seed,
        params={"delta": args.delta},
        workers=args.workers,
        out_dir=args.out,
    )
    report, rows = run_experiment(config)
    write_outputs(config, report, rows)
    block = report["blocks"][0]
    print(f"n={block['n']} delta={block['delta']} cap={block['cap']}")
    for name, rate in block["pass_rates"].items():
        print(f"  {name}: pass rate {rate:.2f}")
    if block["first_failure"]:
        print("first failing trial detail:")
        print(json.dumps(block["first_failure"], indent=2)[:2000])
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
