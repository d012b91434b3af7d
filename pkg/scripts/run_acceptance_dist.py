#!/usr/bin/env python3
"""Sample the number of offers accepted under the 1/k rule and compare the
empirical moments with harmonic-number predictions and the optimized tail
bound."""

import argparse

from stablematch.harness import ExperimentConfig, run_experiment, write_outputs


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--m", type=int, default=10_000)
    ap.add_argument("--trials", type=int, default=2000)
    ap.add_argument("--eps", type=float, default=0.5)
    ap.add_argument("--seed", type=int, default=20260808)
    ap.add_argument("--out", default="results/acceptance_dist")
    args = ap.parse_args()
    config = ExperimentConfig(
        kind="acceptance_dist",
        n=1,
        trials=args.trials,
        master_seed=args.seed,
        params={"m": args.m, "eps": args.eps},
        out_dir=args.out,
    )
    report, rows = run_experiment(config)
    write_outputs(config, report, rows)
    block = report["blocks"][0]
    print(
        f"m={block['m']}: mean {block['summary']['mean']:.4f} "
        f"(expected {block['expected_mean']:.4f}, "
        f"{block['mean_error_in_stderr']:+.2f} stderr)"
    )
    print(
        f"variance {block['summary']['variance']:.4f} "
        f"(expected {block['expected_variance']:.4f})"
    )
    print(
        f"tail >= {block['tail_threshold']:.3f}: frequency "
        f"{block['tail_frequency']:.4f} vs bound {block['tail_bound']['value']:.4f}"
    )
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
