"""The randomized proposal process: deferred-decision matching as a chain.

Instead of fixing preference tables up front, preferences unfold as random
draws while the proposal algorithm runs. Boys propose to a girl chosen
uniformly among all n girls ("amnesia": a boy may repeat himself, and such
redundant proposals are always rejected); a girl accepts her k-th fresh
offer with probability 1/k. This chain has the same transition
probabilities as the stable-husband search on a uniformly random instance,
so its output stream is distributed exactly like that girl's stable
husbands.

The chain itself never halts (a boy who has tried every girl keeps making
redundant proposals forever), so `run` adds stop rules: "natural" fires
where the deterministic search would terminate, "cap" after a fixed number
of proposals, "first_output" as soon as the first husband is emitted.

States are mutable and confined to one worker each; aggregate RunStats
across workers only after their runs complete.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .rng import Rng


@dataclass
class RunStats:
    """Counters accumulated over one run of the process.

    Times are proposal counts, 1-based at each proposal; t is the total.
    proposals_per_girl includes redundant proposals, nonredundant_per_girl
    counts only fresh ones. pre_output_acceptances counts the designated
    girl's acceptances that were superseded before the first output, so
    acceptances_by_girl == len(outputs) + pre_output_acceptances exactly.
    """

    n: int
    girl: int
    t: int = 0
    proposals_per_girl: list[int] = field(default_factory=list)
    nonredundant_per_girl: list[int] = field(default_factory=list)
    proposals_per_boy: list[int] = field(default_factory=list)
    runs_per_boy: list[int] = field(default_factory=list)
    run_lengths: list[tuple[int, int, int]] | None = None
    pair_counts: list[dict[int, int]] | None = None
    redundant_proposals: int = 0
    outputs: list[tuple[int, int]] = field(default_factory=list)
    first_output_time: int | None = None
    acceptances_by_girl: int = 0
    pre_output_acceptances: int = 0
    stopped: str | None = None

    def copy(self) -> "RunStats":
        out = RunStats(self.n, self.girl)
        out.t = self.t
        out.proposals_per_girl = list(self.proposals_per_girl)
        out.nonredundant_per_girl = list(self.nonredundant_per_girl)
        out.proposals_per_boy = list(self.proposals_per_boy)
        out.runs_per_boy = list(self.runs_per_boy)
        out.run_lengths = None if self.run_lengths is None else list(self.run_lengths)
        out.pair_counts = (
            None if self.pair_counts is None else [dict(d) for d in self.pair_counts]
        )
        out.redundant_proposals = self.redundant_proposals
        out.outputs = list(self.outputs)
        out.first_output_time = self.first_output_time
        out.acceptances_by_girl = self.acceptances_by_girl
        out.pre_output_acceptances = self.pre_output_acceptances
        out.stopped = self.stopped
        return out


@dataclass
class ProcessState:
    """Live state of the chain, one proposer active at a time.

    proposed[b] is the set of girls boy b has tried; best_offer[j] the boy
    holding girl j's best offer so far (None before her first fresh
    proposal); offers[j] her count of fresh proposals. introduced counts
    boys who have entered the game.
    """

    n: int
    girl: int
    proposed: list[set[int]]
    introduced: int
    proposer: int
    best_offer: list[int | None]
    offers: list[int]
    post_first_output: bool
    run_length: int
    run_fresh: int
    stats: RunStats

    @property
    def outputs(self) -> list[tuple[int, int]]:
        return self.stats.outputs

    def clone(self) -> "ProcessState":
        return ProcessState(
            n=self.n,
            girl=self.girl,
            proposed=[set(s) for s in self.proposed],
            introduced=self.introduced,
            proposer=self.proposer,
            best_offer=list(self.best_offer),
            offers=list(self.offers),
            post_first_output=self.post_first_output,
            run_length=self.run_length,
            run_fresh=self.run_fresh,
            stats=self.stats.copy(),
        )


@dataclass(frozen=True)
class StepEvent:
    """What one proposal did: who asked whom, and how it was resolved."""

    time: int
    proposer: int
    girl: int
    redundant: bool
    accepted: bool
    output: int | None = None


def new_state(
    n: int, girl: int, track_pairs: bool = True, track_runs: bool = True
) -> ProcessState:
    """Fresh state with boy 0 introduced as the first proposer."""
    if n < 1:
        raise ValueError("process size must be at least 1")
    if not 0 <= girl < n:
        raise ValueError(f"designated girl {girl} out of range for n={n}")
    stats = RunStats(n=n, girl=girl)
    stats.proposals_per_girl = [0] * n
    stats.nonredundant_per_girl = [0] * n
    stats.proposals_per_boy = [0] * n
    stats.runs_per_boy = [0] * n
    stats.runs_per_boy[0] = 1
    if track_runs:
        stats.run_lengths = []
    if track_pairs:
        stats.pair_counts = [dict() for _ in range(n)]
    return ProcessState(
        n=n,
        girl=girl,
        proposed=[set() for _ in range(n)],
        introduced=1,
        proposer=0,
        best_offer=[None] * n,
        offers=[0] * n,
        post_first_output=False,
        run_length=0,
        run_fresh=0,
        stats=stats,
    )


def step(state: ProcessState, rng: Rng, amnesia: bool = True) -> StepEvent:
    """Perform exactly one proposal and resolve it, mutating the state.

    Draw order is fixed for reproducibility: one uniform integer for the
    proposed girl, then (for fresh proposals only) one uniform real for the
    acceptance test against 1/k. A redundant proposal consumes just the
    integer draw, is rejected, and leaves the proposer in place. With
    amnesia off, the proposer draws uniformly among the girls he has not
    tried, which changes no output distribution but makes every proposal
    fresh; it is an error to step an exhausted proposer in that mode.
    """
    n = state.n
    stats = state.stats
    p = state.proposer
    tried = state.proposed[p]
    if amnesia:
        h = rng.randrange(n)
    else:
        if len(tried) == n:
            raise ValueError(f"proposer {p} has already tried every girl")
        while True:
            h = rng.randrange(n)
            if h not in tried:
                break
    stats.t += 1
    t = stats.t
    stats.proposals_per_girl[h] += 1
    stats.proposals_per_boy[p] += 1
    state.run_length += 1
    if stats.pair_counts is not None:
        pc = stats.pair_counts[p]
        pc[h] = pc.get(h, 0) + 1
    if h in tried:
        stats.redundant_proposals += 1
        return StepEvent(t, p, h, redundant=True, accepted=False)
    tried.add(h)
    k = state.offers[h] + 1
    state.offers[h] = k
    stats.nonredundant_per_girl[h] += 1
    state.run_fresh += 1
    if rng.random() * k >= 1.0:
        return StepEvent(t, p, h, redundant=False, accepted=False)

    # Accepted: the run ends and a new proposer is dispatched.
    if stats.run_lengths is not None:
        stats.run_lengths.append((p, state.run_length, state.run_fresh))
    state.run_length = 0
    state.run_fresh = 0
    if h == state.girl:
        stats.acceptances_by_girl += 1
        if stats.first_output_time is None:
            stats.pre_output_acceptances = stats.acceptances_by_girl
    previous = state.best_offer[h]
    state.best_offer[h] = p
    output: int | None = None
    if previous is None:
        if state.introduced < n:
            nxt = state.introduced
            state.introduced += 1
        else:
            output = state.best_offer[state.girl]
            assert output is not None
            nxt = output
    elif h == state.girl and state.post_first_output:
        output = p
        nxt = p
    else:
        nxt = previous
    if output is not None:
        stats.outputs.append((output, t))
        if stats.first_output_time is None:
            stats.first_output_time = t
            stats.pre_output_acceptances = stats.acceptances_by_girl - 1
            state.post_first_output = True
    state.proposer = nxt
    stats.runs_per_boy[nxt] += 1
    return StepEvent(t, p, h, redundant=False, accepted=True, output=output)


def run(
    n: int,
    girl: int,
    seed: int,
    stop: str = "natural",
    max_proposals: int | None = None,
    amnesia: bool = True,
    track_pairs: bool = True,
    track_runs: bool = True,
) -> tuple[list[tuple[int, int]], RunStats]:
    """Run the chain from a fresh state until the stop rule fires.

    stop is one of:
      "natural"      the current proposer has tried every girl, which is
                     where the deterministic search would terminate;
      "cap"          exactly max_proposals proposals have been made;
      "first_output" the first husband has just been emitted.

    max_proposals is required for "cap" and acts as a safety limit for the
    other rules when given. Returns (outputs, stats); outputs are
    (boy, time) pairs.

    The loop is an inlined copy of `step` for speed; the two are held in
    agreement by tests that compare them state for state.
    """
    if stop not in ("natural", "cap", "first_output"):
        raise ValueError(f"unknown stop rule {stop!r}")
    if stop == "cap":
        if max_proposals is None or max_proposals < 1:
            raise ValueError("stop='cap' requires max_proposals >= 1")
    state = new_state(n, girl, track_pairs=track_pairs, track_runs=track_runs)
    stats = state.stats

    proposed = state.proposed
    best_offer = state.best_offer
    offers = state.offers
    per_girl = stats.proposals_per_girl
    fresh_per_girl = stats.nonredundant_per_girl
    per_boy = stats.proposals_per_boy
    runs_per_boy = stats.runs_per_boy
    run_lengths = stats.run_lengths
    pair_counts = stats.pair_counts
    outputs = stats.outputs
    rng = Rng(seed)
    rng_randrange = rng.randrange
    rng_random = rng.random

    t = 0
    p = state.proposer
    introduced = state.introduced
    post = False
    run_len = 0
    run_fresh = 0
    redundant_total = 0
    accepts_by_g = 0
    g = girl
    cap = max_proposals if max_proposals is not None else None

    while True:
        tried = proposed[p]
        if stop == "natural" and len(tried) == n:
            stats.stopped = "natural"
            break
        if cap is not None and t >= cap:
            if stop == "cap":
                stats.stopped = "cap"
                break
            raise RuntimeError(
                f"safety limit of {cap} proposals reached before stop rule {stop!r}"
            )
        if amnesia:
            h = rng_randrange(n)
        else:
            if len(tried) == n:
                stats.stopped = "natural"
                break
            while True:
                h = rng_randrange(n)
                if h not in tried:
                    break
        t += 1
        per_girl[h] += 1
        per_boy[p] += 1
        run_len += 1
        if pair_counts is not None:
            pc = pair_counts[p]
            pc[h] = pc.get(h, 0) + 1
        if h in tried:
            redundant_total += 1
            continue
        tried.add(h)
        k = offers[h] + 1
        offers[h] = k
        fresh_per_girl[h] += 1
        run_fresh += 1
        if rng_random() * k >= 1.0:
            continue
        if run_lengths is not None:
            run_lengths.append((p, run_len, run_fresh))
        run_len = 0
        run_fresh = 0
        if h == g:
            accepts_by_g += 1
        previous = best_offer[h]
        best_offer[h] = p
        emitted: int | None = None
        if previous is None:
            if introduced < n:
                nxt = introduced
                introduced += 1
            else:
                emitted = best_offer[g]
                nxt = emitted  # type: ignore[assignment]
        elif h == g and post:
            emitted = p
            nxt = p
        else:
            nxt = previous
        if emitted is not None:
            outputs.append((emitted, t))
            if stats.first_output_time is None:
                stats.first_output_time = t
                stats.pre_output_acceptances = accepts_by_g - 1
                post = True
        p = nxt
        runs_per_boy[p] += 1
        if stop == "first_output" and emitted is not None:
            stats.stopped = "first_output"
            break

    stats.t = t
    stats.redundant_proposals = redundant_total
    stats.acceptances_by_girl = accepts_by_g
    if stats.first_output_time is None:
        stats.pre_output_acceptances = accepts_by_g
    if run_lengths is not None and run_len > 0:
        # The run in progress at the stop is recorded as observed so far.
        run_lengths.append((p, run_len, run_fresh))
    state.proposer = p
    state.introduced = introduced
    state.post_first_output = post
    state.run_length = run_len
    state.run_fresh = run_fresh
    return list(outputs), stats


@dataclass(frozen=True)
class AuditCheck:
    """Outcome of one empirical bound check over a capped window."""

    name: str
    passed: bool
    lower: float | None
    upper: float | None
    worst: float
    violations: tuple[dict, ...]

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "passed": self.passed,
            "lower": self.lower,
            "upper": self.upper,
            "worst": self.worst,
            "violation_count": len(self.violations),
            "violations": list(self.violations[:20]),
        }


@dataclass(frozen=True)
class AuditReport:
    """Seven per-entity bound checks over the first floor(n^(1+delta)) proposals."""

    n: int
    delta: float
    cap: int
    passed: bool
    checks: tuple[AuditCheck, ...]

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "delta": self.delta,
            "cap": self.cap,
            "passed": self.passed,
            "checks": {c.name: c.to_dict() for c in self.checks},
        }


def audit_window_stats(stats: RunStats, n: int, delta: float) -> AuditReport:
    """Audit a capped run against the asymptotic per-entity bounds.

    The checks, with nd = n**delta and logs natural (log factors and final
    thresholds are floored at 1 so toy sizes stay meaningful):

      girl_proposal_window   every girl received between nd/2 and 2*nd
                             proposals, redundant ones included
      boy_run_starts         every boy began at most 2*nd runs
      run_fresh_length       every run made at most nd*(log n)^2 fresh
                             proposals
      run_total_length       every run made at most nd*(log n)^2 proposals
      boy_total_proposals    every boy made at most 2*n^(2*delta)*(log n)^2
                             proposals
      pair_repeat_proposals  no boy proposed to one girl more than log n
                             times
      girl_fresh_floor       every girl received at least nd/(2*log n)
                             fresh proposals

    Requires stats from a run capped at exactly floor(n^(1+delta)) proposals
    with pair and run tracking enabled. Failures are reported with the
    offending entity, never raised.
    """
    if stats.n != n:
        raise ValueError(f"stats cover n={stats.n}, audit requested n={n}")
    cap = math.floor(n ** (1 + delta))
    if stats.t != cap:
        raise ValueError(
            f"cap mismatch: stats cover t={stats.t} proposals, expected "
            f"floor(n^(1+delta)) = {cap}"
        )
    if stats.pair_counts is None or stats.run_lengths is None:
        raise ValueError("audit requires a run with pair and run tracking enabled")

    log_n = max(math.log(n), 1.0)
    nd = float(n) ** delta
    clamp = lambda x: max(x, 1.0)

    girl_lo = clamp(0.5 * nd)
    girl_hi = clamp(2.0 * nd)
    run_starts_hi = clamp(2.0 * nd)
    run_len_hi = clamp(nd * log_n**2)
    boy_total_hi = clamp(2.0 * nd**2 * log_n**2)
    pair_hi = clamp(log_n)
    fresh_floor = clamp(0.5 * nd / log_n)

    checks: list[AuditCheck] = []

    def add(name, lower, upper, worst, violations):
        checks.append(
            AuditCheck(
                name=name,
                passed=not violations,
                lower=lower,
                upper=upper,
                worst=float(worst),
                violations=tuple(violations),
            )
        )

    counts = stats.proposals_per_girl
    bad = [
        {"girl": j, "count": c}
        for j, c in enumerate(counts)
        if not girl_lo <= c <= girl_hi
    ]
    worst = max(counts) if max(counts) > girl_hi else min(counts)
    add("girl_proposal_window", girl_lo, girl_hi, worst, bad)

    bad = [
        {"boy": b, "runs": r}
        for b, r in enumerate(stats.runs_per_boy)
        if r > run_starts_hi
    ]
    add("boy_run_starts", None, run_starts_hi, max(stats.runs_per_boy), bad)

    bad = [
        {"boy": b, "fresh_length": fresh}
        for b, total, fresh in stats.run_lengths
        if fresh > run_len_hi
    ]
    worst = max((fresh for _, _, fresh in stats.run_lengths), default=0)
    add("run_fresh_length", None, run_len_hi, worst, bad)

    bad = [
        {"boy": b, "length": total}
        for b, total, fresh in stats.run_lengths
        if total > run_len_hi
    ]
    worst = max((total for _, total, _ in stats.run_lengths), default=0)
    add("run_total_length", None, run_len_hi, worst, bad)

    bad = [
        {"boy": b, "proposals": c}
        for b, c in enumerate(stats.proposals_per_boy)
        if c > boy_total_hi
    ]
    add("boy_total_proposals", None, boy_total_hi, max(stats.proposals_per_boy), bad)

    bad = []
    worst = 0
    for b, pc in enumerate(stats.pair_counts):
        for j, c in pc.items():
            worst = max(worst, c)
            if c > pair_hi:
                bad.append({"boy": b, "girl": j, "count": c})
    add("pair_repeat_proposals", None, pair_hi, worst, bad)

    fresh = stats.nonredundant_per_girl
    bad = [
        {"girl": j, "fresh_count": c} for j, c in enumerate(fresh) if c < fresh_floor
    ]
    add("girl_fresh_floor", fresh_floor, None, min(fresh), bad)

    return AuditReport(
        n=n,
        delta=delta,
        cap=cap,
        passed=all(c.passed for c in checks),
        checks=tuple(checks),
    )
