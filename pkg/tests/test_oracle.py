from __future__ import annotations

import pytest
from hypothesis import given, settings, strategies as st

from stablematch.instance import PreferenceInstance, fixture_4x4
from stablematch.matching import find_blocking_pairs
from stablematch.oracle import (
    OracleScaleError,
    enumerate_stable,
    husband_set,
    worst_husband,
)

A, B, C, D = range(4)
W, X, Y, Z = range(4)


@st.composite
def instances(draw, max_n: int = 6):
    n = draw(st.integers(1, max_n))
    girl = [draw(st.permutations(range(n))) for _ in range(n)]
    boy = [draw(st.permutations(range(n))) for _ in range(n)]
    return PreferenceInstance.from_prefs(girl, boy)


class TestFixture:
    def test_exactly_two_stable_matchings(self):
        stable = enumerate_stable(fixture_4x4())
        found = {m.husband_of for m in stable.matchings}
        assert found == {(Z, W, X, Y), (Y, W, X, Z)}

    def test_husband_sets(self):
        stable = enumerate_stable(fixture_4x4())
        assert husband_set(stable, A) == {Y, Z}
        assert husband_set(stable, B) == {W}
        assert husband_set(stable, C) == {X}  # Cindy marries Xavier in both
        assert husband_set(stable, D) == {Y, Z}

    def test_worst_husband(self):
        stable = enumerate_stable(fixture_4x4())
        assert worst_husband(stable, fixture_4x4(), A) == Z  # she prefers Y


def test_n1_single_matching():
    inst = PreferenceInstance.from_prefs([[0]], [[0]])
    stable = enumerate_stable(inst)
    assert len(stable.matchings) == 1
    assert husband_set(stable, 0) == {0}


def test_n2_contested_boy():
    # Both girls want boy 0 and both boys want girl 0. Of the two complete
    # matchings, swapping gives girl 0 boy 1, and (girl 0, boy 0) blocks it;
    # only the aligned matching is stable.
    inst = PreferenceInstance.from_prefs([[0, 1], [0, 1]], [[0, 1], [0, 1]])
    stable = enumerate_stable(inst)
    assert [m.husband_of for m in stable.matchings] == [(0, 1)]


def test_scale_cap():
    inst = PreferenceInstance.from_prefs(
        [[(i + j) % 9 for j in range(9)] for i in range(9)],
        [[(i + j) % 9 for j in range(9)] for i in range(9)],
    )
    with pytest.raises(OracleScaleError, match="oracle scale exceeded"):
        enumerate_stable(inst)


def test_husband_set_range_check():
    stable = enumerate_stable(fixture_4x4())
    with pytest.raises(ValueError):
        husband_set(stable, 4)


@settings(max_examples=60, deadline=None)
@given(instances())
def test_all_results_stable_distinct_and_nonempty(inst):
    stable = enumerate_stable(inst)
    assert len(stable.matchings) >= 1  # a stable matching always exists
    seen = set()
    for m in stable.matchings:
        assert m.complete
        assert find_blocking_pairs(inst, m) == []
        assert m.husband_of not in seen
        seen.add(m.husband_of)
    for g in range(inst.n):
        assert stable.husband_sets[g] == {m.husband_of[g] for m in stable.matchings}
