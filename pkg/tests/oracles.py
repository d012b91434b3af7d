"""Independent oracles the tests check library results against.

Everything here is deliberately naive (convolutions, direct summation,
explicit recurrences) and shares no code with the implementations under
test.
"""

from __future__ import annotations

import math
from collections import Counter


def bernoulli_sum_pmf(ps: list[float]) -> list[float]:
    """Exact pmf of a sum of independent Bernoulli(p_i), by convolution."""
    pmf = [1.0]
    for p in ps:
        nxt = [0.0] * (len(pmf) + 1)
        for k, mass in enumerate(pmf):
            nxt[k] += mass * (1 - p)
            nxt[k + 1] += mass * p
        pmf = nxt
    return pmf


def acceptance_pmf_convolution(m: int) -> list[float]:
    """Acceptances of m offers under the 1/k rule, as a Bernoulli sum."""
    return bernoulli_sum_pmf([1.0 / k for k in range(1, m + 1)])


def acceptance_pmf_cycle_recurrence(m: int) -> list[float]:
    """Same distribution via the cycle-count recurrence.

    p_m(j) = p_{m-1}(j-1) / m + p_{m-1}(j) * (m-1) / m, the distribution of
    the number of cycles (equivalently records) of a uniform permutation of
    m items. Cross-checks the convolution oracle.
    """
    pmf = [1.0]
    for k in range(1, m + 1):
        nxt = [0.0] * (len(pmf) + 1)
        for j, mass in enumerate(pmf):
            nxt[j + 1] += mass / k
            nxt[j] += mass * (k - 1) / k
        pmf = nxt
    return pmf


def binomial_pmf(n: int, p: float) -> list[float]:
    """Binomial(n, p) pmf by direct combinatorial evaluation."""
    return [math.comb(n, k) * p**k * (1 - p) ** (n - k) for k in range(n + 1)]


def upper_tail(pmf: list[float], r: float) -> float:
    return sum(mass for k, mass in enumerate(pmf) if k >= r)


def lower_tail(pmf: list[float], r: float) -> float:
    return sum(mass for k, mass in enumerate(pmf) if k <= r)


def chi_square(counts: list[int], expected: list[float]) -> float:
    return sum((c - e) ** 2 / e for c, e in zip(counts, expected))


def tv_distance(counts_a: Counter, counts_b: Counter, t_a: int, t_b: int) -> float:
    keys = set(counts_a) | set(counts_b)
    return 0.5 * sum(abs(counts_a[k] / t_a - counts_b[k] / t_b) for k in keys)


def harmonic_direct(m: int) -> float:
    return sum(1.0 / k for k in range(1, m + 1))


def serial_dictatorship(
    common_boy_prefs: list[int], girl_prefs: list[list[int]]
) -> list[int]:
    """Expected matching when every boy ranks the girls identically.

    The first-ranked girl picks her favorite boy, the second-ranked picks
    her favorite among the rest, and so on. Returns husband_of.
    """
    n = len(common_boy_prefs)
    husband: list[int | None] = [None] * n
    taken: set[int] = set()
    for g in common_boy_prefs:
        choice = next(b for b in girl_prefs[g] if b not in taken)
        husband[g] = choice
        taken.add(choice)
    return [b for b in husband if b is not None]
