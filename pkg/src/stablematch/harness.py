"""Seeded Monte Carlo experiment engine with deterministic aggregation.

Five experiment kinds are supported:

  theorem          husband counts of one girl on fresh uniform instances
                   (method "a", the enumeration algorithm, is ground truth;
                   method "b", the randomized proposal process, is the fast
                   equivalent), summarized against a [c*ln n, C*ln n]
                   envelope;
  equivalence      total-variation distance between the husband-count
                   distributions of the two methods;
  lemma_audit      per-entity bound audits over capped windows, aggregated
                   across seeds;
  acceptance_dist  acceptances of m offers under the 1/k rule, compared to
                   harmonic-number moments and an optimized tail bound;
  coupon           time of the first output versus the classical collector
                   expectation n*H_n.

Per-trial seeds are derived arithmetically from (master seed, kind, n,
trial), so a report depends only on the logical configuration, never on
worker count or scheduling; trial rows are folded in index order. Report
dictionaries contain no wall-clock values (per-trial timings go only to
the CSV rows).
"""

from __future__ import annotations

import csv
import json
import math
import time
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from . import bounds as _bounds
from .instance import generate_uniform
from .matching import stable_husbands
from .random_model import audit_window_stats, run as run_process
from .rng import derive_seed

KINDS = ("theorem", "equivalence", "lemma_audit", "acceptance_dist", "coupon")
_KIND_IDS = {kind: i + 1 for i, kind in enumerate(KINDS)}

CSV_COLUMNS = (
    "trial",
    "seed",
    "husband_count",
    "first_output_time",
    "accept_pre_output",
    "elapsed_us",
)


class ConfigError(ValueError):
    """The experiment configuration is invalid; nothing was run."""


@dataclass
class ExperimentConfig:
    """One experiment: a kind, one size or a size sweep, and seeding.

    params carries the kind-specific constants (c, C, delta, eps, m); gate
    optionally names report fields that must hold for a zero exit status.
    workers, out_dir and plot_data affect execution only, never results.
    """

    kind: str
    n: int | list[int]
    trials: int
    master_seed: int
    girl: int = 0
    method: str = "a"
    params: dict = field(default_factory=dict)
    gate: dict | None = None
    workers: int = 1
    out_dir: str | None = None
    plot_data: bool = False

    @property
    def sizes(self) -> list[int]:
        return [self.n] if isinstance(self.n, int) else list(self.n)

    def to_logical_dict(self) -> dict:
        """The result-determining part of the configuration."""
        return {
            "kind": self.kind,
            "n": self.n,
            "trials": self.trials,
            "master_seed": self.master_seed,
            "girl": self.girl,
            "method": self.method,
            "params": dict(sorted(self.params.items())),
            "gate": self.gate,
        }

    @staticmethod
    def from_dict(doc: dict) -> "ExperimentConfig":
        if not isinstance(doc, dict):
            raise ConfigError("experiment config must be a JSON object")
        unknown = set(doc) - {
            "kind",
            "n",
            "trials",
            "master_seed",
            "girl",
            "method",
            "params",
            "gate",
            "workers",
            "out_dir",
            "plot_data",
        }
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        try:
            config = ExperimentConfig(
                kind=str(doc["kind"]).lower(),
                n=doc["n"],
                trials=doc["trials"],
                master_seed=doc["master_seed"],
                girl=doc.get("girl", 0),
                method=doc.get("method", "a"),
                params=doc.get("params", {}),
                gate=doc.get("gate"),
                workers=doc.get("workers", 1),
                out_dir=doc.get("out_dir"),
                plot_data=doc.get("plot_data", False),
            )
        except KeyError as exc:
            raise ConfigError(f"missing config key {exc}")
        validate_config(config)
        return config

    @staticmethod
    def from_json_file(path: str | Path) -> "ExperimentConfig":
        try:
            doc = json.loads(Path(path).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config file: {exc}")
        return ExperimentConfig.from_dict(doc)


def validate_config(config: ExperimentConfig) -> None:
    """Reject an infeasible configuration before any work happens."""
    if config.kind not in KINDS:
        raise ConfigError(f"unknown experiment kind {config.kind!r}; one of {KINDS}")
    sizes = config.sizes
    if not sizes or any(not isinstance(n, int) or n < 1 for n in sizes):
        raise ConfigError(f"n must be a positive integer or list of them, got {config.n}")
    if not isinstance(config.trials, int) or config.trials < 1:
        raise ConfigError(f"trials must be a positive integer, got {config.trials}")
    if not isinstance(config.master_seed, int):
        raise ConfigError("master_seed must be an integer")
    if config.method not in ("a", "b"):
        raise ConfigError(f"method must be 'a' or 'b', got {config.method!r}")
    if config.workers < 1:
        raise ConfigError("workers must be at least 1")
    p = config.params
    if config.kind in ("theorem", "equivalence", "coupon", "lemma_audit"):
        if not all(0 <= config.girl < n for n in sizes):
            raise ConfigError(f"girl index {config.girl} out of range for n={config.n}")
    if config.kind == "theorem":
        c = p.get("c", 0.3)
        big_c = p.get("C", 2.0)
        delta = p.get("delta", 0.45)
        eps = p.get("eps", 0.05)
        for n in sizes:
            try:
                _bounds.husband_count_envelope(n, c, big_c, delta, eps)
            except ValueError as exc:
                raise ConfigError(f"theorem parameters infeasible at n={n}: {exc}")
    if config.kind == "lemma_audit":
        delta = p.get("delta")
        if delta is None or not 0 < delta < 0.5:
            raise ConfigError("lemma_audit requires params.delta in (0, 1/2)")
    if config.kind == "acceptance_dist":
        m = p.get("m")
        if not isinstance(m, int) or m < 1:
            raise ConfigError("acceptance_dist requires integer params.m >= 1")
        if p.get("eps", 0.5) <= 0:
            raise ConfigError("acceptance_dist eps must be positive")


@dataclass(frozen=True)
class TrialResult:
    trial: int
    seed: int
    husband_count: int
    first_output_time: int | None
    pre_output_acceptances: int
    elapsed_us: int

    def row(self) -> list:
        return [
            self.trial,
            self.seed,
            self.husband_count,
            self.first_output_time if self.first_output_time is not None else "",
            self.pre_output_acceptances,
            self.elapsed_us,
        ]


def summarize(values: list, envelope: tuple[float, float] | None = None) -> dict:
    """Order-independent summary statistics of numeric trial outcomes.

    Quantiles use linear interpolation on the sorted values; the histogram
    has one bin per distinct value (outcomes here are small integers).
    """
    if not values:
        raise ValueError("summarize requires at least one value")
    xs = sorted(values)
    t = len(xs)
    mean = sum(xs) / t
    variance = sum((x - mean) ** 2 for x in xs) / (t - 1) if t > 1 else 0.0
    out = {
        "count": t,
        "mean": mean,
        "variance": variance,
        "min": xs[0],
        "max": xs[-1],
        "p5": _quantile(xs, 0.05),
        "p50": _quantile(xs, 0.50),
        "p95": _quantile(xs, 0.95),
        "histogram": [[k, v] for k, v in sorted(Counter(xs).items())],
    }
    if envelope is not None:
        lo, hi = envelope
        out["envelope"] = [lo, hi]
        out["inside_fraction"] = sum(1 for x in xs if lo <= x <= hi) / t
        out["below_fraction"] = sum(1 for x in xs if x < lo) / t
        out["above_fraction"] = sum(1 for x in xs if x > hi) / t
    return out


def _quantile(sorted_xs: list, q: float) -> float:
    idx = q * (len(sorted_xs) - 1)
    lo = math.floor(idx)
    hi = min(lo + 1, len(sorted_xs) - 1)
    frac = idx - lo
    return sorted_xs[lo] * (1 - frac) + sorted_xs[hi] * frac


def tv_distance(counts_a: Counter, counts_b: Counter, t_a: int, t_b: int) -> float:
    """Total-variation distance between two empirical count distributions."""
    keys = set(counts_a) | set(counts_b)
    return 0.5 * sum(abs(counts_a[k] / t_a - counts_b[k] / t_b) for k in keys)


def _husband_count_trial(args: tuple) -> TrialResult:
    """One theorem/equivalence-style trial; picklable for worker pools."""
    trial, seed, n, girl, method = args
    start = time.perf_counter_ns()
    if method == "a":
        enum = stable_husbands(generate_uniform(n, seed), girl)
        count = len(enum.husbands)
        fot = enum.first_output_time
        pre = enum.pre_output_acceptances
    else:
        outputs, stats = run_process(
            n, girl, seed, stop="natural", track_pairs=False, track_runs=False
        )
        count = len(outputs)
        fot = stats.first_output_time
        pre = stats.pre_output_acceptances
    elapsed = (time.perf_counter_ns() - start) // 1000
    return TrialResult(trial, seed, count, fot, pre, elapsed)


def _coupon_trial(args: tuple) -> TrialResult:
    trial, seed, n, girl = args
    start = time.perf_counter_ns()
    outputs, stats = run_process(
        n, girl, seed, stop="first_output", track_pairs=False, track_runs=False
    )
    elapsed = (time.perf_counter_ns() - start) // 1000
    return TrialResult(
        trial,
        seed,
        len(outputs),
        stats.first_output_time,
        stats.pre_output_acceptances,
        elapsed,
    )


def _audit_trial(args: tuple) -> tuple[TrialResult, dict]:
    trial, seed, n, girl, delta, cap = args
    start = time.perf_counter_ns()
    outputs, stats = run_process(n, girl, seed, stop="cap", max_proposals=cap)
    report = audit_window_stats(stats, n, delta)
    elapsed = (time.perf_counter_ns() - start) // 1000
    result = TrialResult(
        trial,
        seed,
        len(outputs),
        stats.first_output_time,
        stats.pre_output_acceptances,
        elapsed,
    )
    return result, report.to_dict()


def _map_trials(worker, args_list: list, workers: int) -> list:
    """Run trials across a pool; result order always follows trial order."""
    if workers <= 1 or len(args_list) <= 1:
        return [worker(a) for a in args_list]
    chunk = max(1, len(args_list) // (workers * 4))
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(worker, args_list, chunksize=chunk))


def run_experiment(config: ExperimentConfig) -> tuple[dict, list[TrialResult]]:
    """Execute the experiment; returns (report, trial rows).

    The report is a plain JSON-ready dictionary determined entirely by the
    logical configuration. Trial rows carry per-trial timings and are only
    written to CSV, never folded into the report.
    """
    validate_config(config)
    blocks = []
    all_rows: list[TrialResult] = []
    for n in config.sizes:
        if config.kind == "theorem":
            block, rows = _run_theorem_block(config, n)
        elif config.kind == "equivalence":
            block, rows = _run_equivalence_block(config, n)
        elif config.kind == "lemma_audit":
            block, rows = _run_audit_block(config, n)
        elif config.kind == "acceptance_dist":
            block, rows = _run_acceptance_block(config, n)
        else:
            block, rows = _run_coupon_block(config, n)
        blocks.append(block)
        all_rows.extend(rows)
    report = {
        "config": config.to_logical_dict(),
        "kind": config.kind,
        "blocks": blocks,
    }
    report["gate_failures"] = check_gate(config, report)
    return report, all_rows


def _trial_seeds(config: ExperimentConfig, n: int, stream: int = 0) -> list[int]:
    kind_id = _KIND_IDS[config.kind]
    return [
        derive_seed(config.master_seed, kind_id, n, stream, trial)
        for trial in range(config.trials)
    ]


def _run_theorem_block(config: ExperimentConfig, n: int) -> tuple[dict, list]:
    p = config.params
    envelope = _bounds.husband_count_envelope(
        n, p.get("c", 0.3), p.get("C", 2.0), p.get("delta", 0.45), p.get("eps", 0.05)
    )
    seeds = _trial_seeds(config, n)
    args = [(i, s, n, config.girl, config.method) for i, s in enumerate(seeds)]
    results = _map_trials(_husband_count_trial, args, config.workers)
    counts = [r.husband_count for r in results]
    block = {
        "n": n,
        "trials": config.trials,
        "method": config.method,
        "girl": config.girl,
        "envelope": envelope.to_dict(),
        "summary": summarize(counts, (envelope.lower, envelope.upper)),
        "first_output": summarize(
            [r.first_output_time for r in results if r.first_output_time is not None]
        ),
        "pre_output_acceptances": summarize(
            [r.pre_output_acceptances for r in results]
        ),
    }
    return block, results


def _run_equivalence_block(config: ExperimentConfig, n: int) -> tuple[dict, list]:
    seeds_a = _trial_seeds(config, n, stream=0)
    seeds_b = _trial_seeds(config, n, stream=1)
    args_a = [(i, s, n, config.girl, "a") for i, s in enumerate(seeds_a)]
    args_b = [
        (i + config.trials, s, n, config.girl, "b") for i, s in enumerate(seeds_b)
    ]
    results_a = _map_trials(_husband_count_trial, args_a, config.workers)
    results_b = _map_trials(_husband_count_trial, args_b, config.workers)
    counts_a = Counter(r.husband_count for r in results_a)
    counts_b = Counter(r.husband_count for r in results_b)
    block = {
        "n": n,
        "trials_per_sampler": config.trials,
        "girl": config.girl,
        "tv_distance": tv_distance(counts_a, counts_b, config.trials, config.trials),
        "histogram_a": [[k, v] for k, v in sorted(counts_a.items())],
        "histogram_b": [[k, v] for k, v in sorted(counts_b.items())],
    }
    return block, results_a + results_b


def _run_audit_block(config: ExperimentConfig, n: int) -> tuple[dict, list]:
    delta = config.params["delta"]
    cap = math.floor(n ** (1 + delta))
    seeds = _trial_seeds(config, n)
    args = [(i, s, n, config.girl, delta, cap) for i, s in enumerate(seeds)]
    outcomes = _map_trials(_audit_trial, args, config.workers)
    results = [r for r, _ in outcomes]
    reports = [rep for _, rep in outcomes]
    check_names = list(reports[0]["checks"])
    pass_rates = {
        name: sum(1 for rep in reports if rep["checks"][name]["passed"])
        / len(reports)
        for name in check_names
    }
    first_failure = None
    for i, rep in enumerate(reports):
        if not rep["passed"]:
            failing = {
                name: check
                for name, check in rep["checks"].items()
                if not check["passed"]
            }
            first_failure = {"trial": i, "failing_checks": failing}
            break
    block = {
        "n": n,
        "delta": delta,
        "cap": cap,
        "trials": config.trials,
        "pass_rates": pass_rates,
        "all_pass_rate": sum(1 for rep in reports if rep["passed"]) / len(reports),
        "first_failure": first_failure,
        "first_report": reports[0],
    }
    return block, results


def _run_acceptance_block(config: ExperimentConfig, n: int) -> tuple[dict, list]:
    import numpy as np

    m = config.params["m"]
    eps = config.params.get("eps", 0.5)
    kind_id = _KIND_IDS["acceptance_dist"]
    inv_k = 1.0 / np.arange(1, m + 1)
    counts: list[int] = []
    results: list[TrialResult] = []
    for trial in range(config.trials):
        seed = derive_seed(config.master_seed, kind_id, n, 0, trial)
        start = time.perf_counter_ns()
        gen = np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))
        count = int((gen.random(m) < inv_k).sum())
        elapsed = (time.perf_counter_ns() - start) // 1000
        counts.append(count)
        results.append(TrialResult(trial, seed, count, None, 0, elapsed))
    h_m = _bounds.harmonic(m)
    h2_m = _bounds.harmonic_second(m)
    expected_var = h_m - h2_m
    stderr = math.sqrt(expected_var / config.trials)
    mean = sum(counts) / len(counts)
    threshold = (1 + eps) * math.log(m)
    tail_freq = sum(1 for c in counts if c >= threshold) / len(counts)
    bound = _bounds.optimize_tail(_bounds.RisingProductPgf(m), "upper", threshold)
    block = {
        "m": m,
        "trials": config.trials,
        "eps": eps,
        "summary": summarize(counts),
        "expected_mean": h_m,
        "expected_variance": expected_var,
        "stderr": stderr,
        "mean_error_in_stderr": (mean - h_m) / stderr,
        "tail_threshold": threshold,
        "tail_frequency": tail_freq,
        "tail_bound": bound.to_dict(),
    }
    return block, results


def _run_coupon_block(config: ExperimentConfig, n: int) -> tuple[dict, list]:
    seeds = _trial_seeds(config, n)
    args = [(i, s, n, config.girl) for i, s in enumerate(seeds)]
    results = _map_trials(_coupon_trial, args, config.workers)
    times = [r.first_output_time for r in results]
    window = (
        math.floor(n * math.log(n) * math.log(math.log(n)))
        if n > 2 and math.log(math.log(n)) > 0
        else None
    )
    expected = n * _bounds.harmonic(n)
    mean = sum(times) / len(times)
    block = {
        "n": n,
        "trials": config.trials,
        "first_output": summarize(times),
        "expected_mean": expected,
        "mean_relative_error": abs(mean - expected) / expected,
        "window": window,
        "within_window_fraction": (
            sum(1 for t in times if t <= window) / len(times)
            if window is not None
            else None
        ),
    }
    return block, results


_GATE_KEYS = {
    "theorem": ("min_inside_fraction", "median_range"),
    "equivalence": ("max_tv",),
    "lemma_audit": ("min_all_pass_rate",),
    "acceptance_dist": ("max_mean_error_stderr", "tail_within_bound"),
    "coupon": ("max_mean_relative_error", "min_window_fraction"),
}


def check_gate(config: ExperimentConfig, report: dict) -> list[str]:
    """Gate failures for the report, empty when everything demanded holds."""
    gate = config.gate
    if not gate:
        return []
    allowed = _GATE_KEYS[config.kind]
    unknown = set(gate) - set(allowed)
    if unknown:
        raise ConfigError(
            f"gate keys {sorted(unknown)} not valid for kind {config.kind!r}; "
            f"allowed: {allowed}"
        )
    failures = []
    for block in report["blocks"]:
        label = f"n={block.get('n', block.get('m'))}"
        if config.kind == "theorem":
            if "min_inside_fraction" in gate:
                got = block["summary"]["inside_fraction"]
                if got < gate["min_inside_fraction"]:
                    failures.append(
                        f"{label}: inside_fraction {got} < {gate['min_inside_fraction']}"
                    )
            if "median_range" in gate:
                lo, hi = gate["median_range"]
                got = block["summary"]["p50"]
                if not lo <= got <= hi:
                    failures.append(f"{label}: median {got} outside [{lo}, {hi}]")
        elif config.kind == "equivalence":
            got = block["tv_distance"]
            if got > gate["max_tv"]:
                failures.append(f"{label}: tv_distance {got} > {gate['max_tv']}")
        elif config.kind == "lemma_audit":
            got = block["all_pass_rate"]
            if got < gate["min_all_pass_rate"]:
                failures.append(
                    f"{label}: all_pass_rate {got} < {gate['min_all_pass_rate']}"
                )
        elif config.kind == "acceptance_dist":
            if "max_mean_error_stderr" in gate:
                got = abs(block["mean_error_in_stderr"])
                if got > gate["max_mean_error_stderr"]:
                    failures.append(
                        f"{label}: |mean error| {got} stderr > "
                        f"{gate['max_mean_error_stderr']}"
                    )
            if gate.get("tail_within_bound"):
                if block["tail_frequency"] > block["tail_bound"]["value"]:
                    failures.append(
                        f"{label}: tail_frequency {block['tail_frequency']} exceeds "
                        f"bound {block['tail_bound']['value']}"
                    )
        else:  # coupon
            if "max_mean_relative_error" in gate:
                got = block["mean_relative_error"]
                if got > gate["max_mean_relative_error"]:
                    failures.append(
                        f"{label}: mean_relative_error {got} > "
                        f"{gate['max_mean_relative_error']}"
                    )
            if "min_window_fraction" in gate:
                got = block["within_window_fraction"]
                if got is None or got < gate["min_window_fraction"]:
                    failures.append(
                        f"{label}: within_window_fraction {got} < "
                        f"{gate['min_window_fraction']}"
                    )
    return failures


def report_json(report: dict) -> str:
    """Canonical serialization; byte-identical for identical reports."""
    return json.dumps(report, indent=2, sort_keys=True) + "\n"


def write_outputs(
    config: ExperimentConfig, report: dict, rows: list[TrialResult]
) -> list[Path]:
    """Write report.json, trials CSV, and optional plot TSV under out_dir."""
    if config.out_dir is None:
        return []
    out = Path(config.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    report_path = out / "report.json"
    report_path.write_text(report_json(report), encoding="utf-8")
    written.append(report_path)
    sizes = config.sizes
    per_block = len(rows) // len(sizes) if sizes else 0
    for i, n in enumerate(sizes):
        name = "trials.csv" if len(sizes) == 1 else f"trials_n{n}.csv"
        path = out / name
        with path.open("w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(CSV_COLUMNS)
            for row in rows[i * per_block : (i + 1) * per_block]:
                writer.writerow(row.row())
        written.append(path)
        if config.plot_data:
            block = report["blocks"][i]
            hist = (
                block.get("summary", {}).get("histogram")
                or block.get("histogram_a")
                or block.get("first_output", {}).get("histogram")
                or []
            )
            total = sum(v for _, v in hist) or 1
            name = "histogram.tsv" if len(sizes) == 1 else f"histogram_n{n}.tsv"
            tsv = out / name
            with tsv.open("w", encoding="utf-8") as fh:
                for value, count in hist:
                    fh.write(f"{value}\t{count / total}\n")
            written.append(tsv)
    return written
