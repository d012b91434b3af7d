#!/usr/bin/env python3
"""Husband-count experiment: fresh uniform instances (or the randomized
process) at one or more sizes, summarized against a [c*ln n, C*ln n]
envelope. Writes report.json and trials.csv under --out."""

import argparse

from stablematch.harness import ExperimentConfig, run_experiment, write_outputs


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, nargs="+", default=[1024])
    ap.add_argument("--trials", type=int, default=200)
    ap.add_argument("--seed", type=int, default=20260808)
    ap.add_argument("--girl", type=int, default=0)
    ap.add_argument("--method", choices=("a", "b"), default="b")
    ap.add_argument("--c", type=float, default=0.3)
    ap.add_argument("--C", type=float, default=2.0)
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--out", default="results/theorem")
    args = ap.parse_args()
    config = ExperimentConfig(
        kind="theorem",
        n=args.n if len(args.n) > 1 else args.n[0],
        trials=args.trials,
        master_seed=args.seed,
        girl=args.girl,
        method=args.method,
        params={"c": args.c, "C": args.C, "delta": 0.45, "eps": 0.05},
        workers=args.workers,
        out_dir=args.out,
        plot_data=True,
    )
    report, rows = run_experiment(config)
    write_outputs(config, report, rows)
    for block in report["blocks"]:
        s = block["summary"]
        print(
            f"n={block['n']}: median {s['p50']}, inside fraction "
            f"{s['inside_fraction']:.3f} of [{s['envelope'][0]:.2f}, "
            f"{s['envelope'][1]:.2f}], below {s['below_fraction']:.3f}"
        )
    print(f"wrote {config.out_dir}/report.json")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
