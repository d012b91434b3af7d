"""Stability checking, proposal matching, and per-girl stable-husband search.

Everything here is a pure function of an immutable PreferenceInstance, so
concurrent calls on shared instances are safe.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Sequence

from .instance import PreferenceInstance


@dataclass(frozen=True, order=True)
class BlockingPair:
    """A girl and boy who each prefer the other to their current situation."""

    girl: int
    boy: int


@dataclass(frozen=True)
class Matching:
    """A possibly partial girl-boy pairing, stored from both sides.

    husband_of[g] is the boy married to girl g (None if unmatched) and
    wife_of[b] the mirror image; the two views are kept mutually consistent.
    """

    husband_of: tuple[int | None, ...]
    wife_of: tuple[int | None, ...]

    @staticmethod
    def from_husbands(husband_of: Sequence[int | None]) -> "Matching":
        n = len(husband_of)
        wife: list[int | None] = [None] * n
        for g, b in enumerate(husband_of):
            if b is None:
                continue
            if not 0 <= b < n:
                raise ValueError(f"boy index {b} out of range for n={n}")
            if wife[b] is not None:
                raise ValueError(f"boy {b} is married to two girls")
            wife[b] = g
        return Matching(tuple(husband_of), tuple(wife))

    @staticmethod
    def from_pairs(n: int, pairs: Sequence[tuple[int, int]]) -> "Matching":
        husband: list[int | None] = [None] * n
        for g, b in pairs:
            if husband[g] is not None:
                raise ValueError(f"girl {g} is married to two boys")
            husband[g] = b
        return Matching.from_husbands(husband)

    @property
    def n(self) -> int:
        return len(self.husband_of)

    @property
    def complete(self) -> bool:
        return all(b is not None for b in self.husband_of)

    def pairs(self) -> Iterator[tuple[int, int]]:
        for g, b in enumerate(self.husband_of):
            if b is not None:
                yield g, b

    def consistent(self) -> bool:
        ok = all(
            b is None or self.wife_of[b] == g for g, b in enumerate(self.husband_of)
        )
        return ok and all(
            g is None or self.husband_of[g] == b for b, g in enumerate(self.wife_of)
        )


@dataclass(frozen=True)
class TraceEvent:
    """One row of an enumeration trace.

    kind is "propose" (boy proposed to girl, accepted or not), "output"
    (a stable husband of the designated girl was emitted), or "terminate".
    time is the number of proposals made so far, 1-based at each proposal.
    """

    kind: str
    time: int
    boy: int | None = None
    girl: int | None = None
    accepted: bool | None = None


@dataclass
class HusbandEnumeration:
    """Everything the stable-husband search produced for one girl.

    husbands lists her stable husbands in output order (worst first, then
    strictly improving); matchings[i] is the complete stable matching in
    force when husbands[i] was emitted. pre_output_acceptances counts her
    acceptances that were superseded before the first output; the standing
    offer at the first output becomes that output, so the identity
    acceptances_by_girl == len(husbands) + pre_output_acceptances holds.
    """

    girl: int
    husbands: list[int]
    matchings: list[Matching]
    trace: list[TraceEvent] | None
    proposal_count: int
    first_output_time: int | None
    acceptances_by_girl: int
    pre_output_acceptances: int


def find_blocking_pairs(
    instance: PreferenceInstance, matching: Matching
) -> list[BlockingPair]:
    """All blocking pairs of the matching, in lexicographic (girl, boy) order.

    A pair blocks when the girl prefers the boy to her partner (an unmatched
    girl prefers anyone) and the boy symmetrically prefers the girl. The
    matching may be partial but must be mutually consistent. Empty result
    means the matching is stable.
    """
    if matching.n != instance.n or not matching.consistent():
        raise ValueError("matching is inconsistent with itself or the instance")
    girl_rank = instance.girl_rank
    boy_rank = instance.boy_rank
    out: list[BlockingPair] = []
    for g in range(instance.n):
        husband = matching.husband_of[g]
        g_bar = instance.n if husband is None else girl_rank[g][husband]
        for b in range(instance.n):
            if girl_rank[g][b] >= g_bar:
                continue
            wife = matching.wife_of[b]
            b_bar = instance.n if wife is None else boy_rank[b][wife]
            if boy_rank[b][g] < b_bar:
                out.append(BlockingPair(g, b))
    return out


def gale_shapley_boys_propose(instance: PreferenceInstance) -> Matching:
    """The boy-optimal stable matching via boy-proposing deferred acceptance.

    Each free boy proposes down his list; a girl keeps the best offer seen so
    far. The result is complete, stable, and independent of the order in
    which free boys are scheduled.
    """
    n = instance.n
    girl_rank = instance.girl_rank
    boy_prefs = instance.boy_prefs
    husband: list[int | None] = [None] * n
    next_choice = [0] * n
    free = list(range(n - 1, -1, -1))
    while free:
        b = free.pop()
        h = boy_prefs[b][next_choice[b]]
        next_choice[b] += 1
        current = husband[h]
        if current is None:
            husband[h] = b
        elif girl_rank[h][b] < girl_rank[h][current]:
            husband[h] = b
            free.append(current)
        else:
            free.append(b)
    return Matching.from_husbands(husband)


def stable_husbands(
    instance: PreferenceInstance, girl: int, keep_trace: bool = False
) -> HusbandEnumeration:
    """Every stable husband of one designated girl, each exactly once.

    The search maintains a partial matching in which every married boy holds
    his best possible partner among the stable matchings still under
    consideration. While some boy is free, the lowest-index free boy
    proposes to the best girl he has not yet approached; a girl accepts
    exactly when the proposal beats the best offer she has ever received.
    When nobody is free the current matching is complete and stable: the
    designated girl's partner is emitted, their pair is dissolved, and the
    emitted boy resumes proposing. From then on the designated girl keeps
    raising her recorded standard but never holds a partner; each proposal
    she accepts is emitted immediately as her next stable husband. The
    search stops when some boy has been turned down by all n girls, at
    which point every stable husband has been emitted, worst first and
    strictly improving.

    The first emitted matching equals gale_shapley_boys_propose(instance).
    """
    n = instance.n
    if not 0 <= girl < n:
        raise ValueError(f"girl index {girl} out of range for n={n}")
    girl_rank = instance.girl_rank
    boy_prefs = instance.boy_prefs

    husband: list[int | None] = [None] * n
    wife: list[int | None] = [None] * n
    best_rank: list[int | None] = [None] * n  # best offer ever, per girl
    next_choice = [0] * n
    t = 0
    post_output = False
    first_output_time: int | None = None
    acceptances_by_girl = 0
    husbands: list[int] = []
    matchings: list[Matching] = []
    trace: list[TraceEvent] | None = [] if keep_trace else None

    def snapshot(extra: tuple[int, int] | None = None) -> Matching:
        rows = list(husband)
        if extra is not None:
            rows[extra[0]] = extra[1]
        return Matching.from_husbands(rows)

    proposer: int | None = None
    while True:
        if proposer is None:
            # Select a free boy; if none, the matching is complete and stable.
            free = next((b for b in range(n) if wife[b] is None), None)
            if free is None:
                s = husband[girl]
                assert s is not None
                husbands.append(s)
                matchings.append(snapshot())
                if trace is not None:
                    trace.append(TraceEvent("output", t, boy=s))
                first_output_time = t
                husband[girl] = None
                wife[s] = None
                proposer = s
                post_output = True
                continue
            proposer = free
        p = proposer
        if next_choice[p] == n:
            if trace is not None:
                trace.append(TraceEvent("terminate", t))
            break
        h = boy_prefs[p][next_choice[p]]
        next_choice[p] += 1
        t += 1
        rank = girl_rank[h][p]
        accepted = best_rank[h] is None or rank < best_rank[h]
        if trace is not None:
            trace.append(TraceEvent("propose", t, boy=p, girl=h, accepted=accepted))
        if not accepted:
            continue
        best_rank[h] = rank
        if h == girl:
            acceptances_by_girl += 1
            if post_output:
                # Emitted immediately; she stays single at her new standard.
                husbands.append(p)
                matchings.append(snapshot(extra=(girl, p)))
                if trace is not None:
                    trace.append(TraceEvent("output", t, boy=p))
                continue
        previous = husband[h]
        husband[h] = p
        wife[p] = h
        if previous is None:
            proposer = None  # back to free-boy selection
        else:
            wife[previous] = None
            proposer = previous

    raw_pre = acceptances_by_girl - (len(husbands) - 1) if husbands else 0
    pre_output = raw_pre - 1 if husbands else acceptances_by_girl
    return HusbandEnumeration(
        girl=girl,
        husbands=husbands,
        matchings=matchings,
        trace=trace,
        proposal_count=t,
        first_output_time=first_output_time,
        acceptances_by_girl=acceptances_by_girl,
        pre_output_acceptances=pre_output,
    )
