#!/usr/bin/env python3
"""Measure when the first husband is emitted (every girl has been proposed
to at least once) against the collector expectation n*H_n and the window
n*ln(n)*lnln(n)."""

import argparse

from stablematch.harness import ExperimentConfig, run_experiment, write_outputs


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=1000)
    ap.add_argument("--trials", type=int, default=100)
    ap.add_argument("--seed", type=int, default=20260808)
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--out", default="results/coupon")
    args = ap.parse_args()
    config = ExperimentConfig(
        kind="coupon",
        n=args.n,
        trials=args.trials,
        master_seed=args.seed,
        workers=args.workers,
        out_dir=args.out,
    )
    report, rows = run_experiment(config)
    write_outputs(config, report, rows)
    block = report["blocks"][0]
    print(
        f"n={block['n']}: mean first output {block['first_output']['mean']:.1f} "
        f"(expected {block['expected_mean']:.1f}, relative error "
        f"{block['mean_relative_error']:.3f})"
    )
    print(
        f"window {block['window']}: fraction inside "
        f"{block['within_window_fraction']}"
    )
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
