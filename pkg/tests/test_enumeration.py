import itertools
import math
from fractions import Fraction

import numpy as np
import pytest

from permcluster import (
    EMPTY_PATTERNS,
    SEP,
    ClusterEvent,
    CountCache,
    DomainError,
    PatternSet,
    Permutation,
    UndefinedProbabilityError,
    avoids_all,
    catalan,
    count_avoiders,
    count_event,
    count_union_event,
    enumerate_avoiders,
    event_count_table,
    exact_probability,
    in_cluster_event,
    parse_permutation,
    ratio_sequence,
)
from permcluster import enumeration


def ps_of(*texts) -> PatternSet:
    return PatternSet(tuple(parse_permutation(t) for t in texts))


def naive_avoider_list(n, ps):
    return [
        vals
        for vals in itertools.permutations(range(1, n + 1))
        if avoids_all(Permutation(vals), ps)
    ]


# ---------------------------------------------------------------------------
# enumeration stream


@pytest.mark.parametrize(
    "ps",
    [EMPTY_PATTERNS, ps_of("321"), ps_of("132"), ps_of("2413"), SEP, ps_of("1234"), ps_of("321", "1234")],
)
def test_stream_matches_naive_filter_and_is_lex(ps):
    for n in range(1, 7):
        got = [p.values for p in enumerate_avoiders(n, ps)]
        assert got == naive_avoider_list(n, ps)
        assert got == sorted(got)
        assert len(set(got)) == len(got)


def test_stream_examples():
    assert [p.text() for p in enumerate_avoiders(3, ps_of("321"))] == ["123", "132", "213", "231", "312"]
    assert [p.text() for p in enumerate_avoiders(1, ps_of("321"))] == ["1"]
    assert [p.text() for p in enumerate_avoiders(2, ps_of("123"))] == ["12", "21"]


def test_stream_rejects_n_zero():
    with pytest.raises(DomainError):
        list(enumerate_avoiders(0, EMPTY_PATTERNS))


# ---------------------------------------------------------------------------
# counting


def test_count_examples():
    assert count_avoiders(5, ps_of("321")) == 42
    assert count_avoiders(4, SEP) == 22
    assert count_avoiders(5, SEP) == 90
    assert count_avoiders(6, SEP) == 394
    assert count_avoiders(7, SEP) == 1806
    assert count_avoiders(4, EMPTY_PATTERNS) == 24
    assert count_avoiders(0, ps_of("321")) == 1
    assert count_avoiders(5, ps_of("2413")) == 103
    assert count_avoiders(6, ps_of("2413")) == 512


def test_count_factorial_small():
    for n in range(1, 7):
        assert count_avoiders(n, EMPTY_PATTERNS) == math.factorial(n)
        assert event_count_table(n, EMPTY_PATTERNS).total == math.factorial(n)


def test_count_catalan_small():
    for p in itertools.permutations((1, 2, 3)):
        ps = PatternSet((Permutation(p),))
        for n in range(1, 9):
            assert count_avoiders(n, ps) == catalan(n)


def test_count_empty_class():
    assert count_avoiders(3, ps_of("12", "21")) == 0
    with pytest.raises(UndefinedProbabilityError):
        exact_probability(3, ps_of("12", "21"), ClusterEvent(2, 1))


def test_catalan_fast_path_validated():
    assert count_avoiders(12, ps_of("321")) == 208012
    assert count_avoiders(12, ps_of("213")) == 208012


def test_separable_fast_path_agrees_with_enumeration_at_11():
    # recurrence value versus a fresh brute-force count at the crossover
    assert count_avoiders(11, SEP) == event_count_table(11, SEP).total


def test_separable_fast_path_large_n():
    d = enumeration._schroeder_counts(20)
    assert d[1:6] == [1, 2, 6, 22, 90]
    assert count_avoiders(20, SEP) == d[20]


# ---------------------------------------------------------------------------
# event counts


def test_count_event_examples():
    assert count_event(5, ps_of("321"), ClusterEvent(2, 1)) == 19
    assert count_event(3, EMPTY_PATTERNS, ClusterEvent(2, 1)) == 4
    assert count_event(3, EMPTY_PATTERNS, ClusterEvent(2, 1)) == 2 * 2 * 1


def test_count_event_against_direct_filter():
    cases = [
        (6, EMPTY_PATTERNS),
        (6, ps_of("321")),
        (6, SEP),
        (6, ps_of("1342")),
        (7, ps_of("123")),
    ]
    for n, ps in cases:
        members = [Permutation(v) for v in naive_avoider_list(n, ps)]
        table = event_count_table(n, ps)
        for l in range(2, n):
            for k in range(1, n - l + 2):
                direct = sum(in_cluster_event(p, ClusterEvent(l, k)) for p in members)
                assert table.by_lk.get((l, k), 0) == direct
                for a in range(1, n - l + 2):
                    direct_a = sum(in_cluster_event(p, ClusterEvent(l, k, a)) for p in members)
                    assert table.by_lka.get((l, k, a), 0) == direct_a
            direct_union = sum(
                any(in_cluster_event(p, ClusterEvent(l, k)) for k in range(1, n - l + 2))
                for p in members
            )
            assert table.union_by_l.get(l, 0) == direct_union


def test_worked_example_is_counted():
    sigma = parse_permutation("798645312")
    ps = ps_of("123")
    assert avoids_all(sigma, ps)
    assert in_cluster_event(sigma, ClusterEvent(3, 4, 4))
    assert count_event(9, ps, ClusterEvent(3, 4, 4)) >= 1


def test_anchored_counts_sum_to_event_count():
    for n, ps in [(7, ps_of("321")), (7, SEP), (6, EMPTY_PATTERNS), (7, ps_of("1234"))]:
        table = event_count_table(n, ps)
        for (l, k), total in table.by_lk.items():
            sum_a = sum(
                table.by_lka.get((l, k, a), 0) for a in range(1, n - l + 2)
            )
            assert sum_a == total


def test_union_count_examples():
    assert count_union_event(3, EMPTY_PATTERNS, 2) == 6  # every sigma in S_3 has an adjacent consecutive pair
    assert count_union_event(4, EMPTY_PATTERNS, 3) == sum(
        any(in_cluster_event(Permutation(v), ClusterEvent(3, k)) for k in (1, 2))
        for v in itertools.permutations(range(1, 5))
    )
    count_union_event(5, EMPTY_PATTERNS, 4)  # l = n - 1 boundary accepted
    with pytest.raises(DomainError):
        count_union_event(5, EMPTY_PATTERNS, 5)


def test_event_range_errors():
    with pytest.raises(DomainError):
        count_event(5, EMPTY_PATTERNS, ClusterEvent(2, 5))
    with pytest.raises(DomainError):
        count_event(5, EMPTY_PATTERNS, ClusterEvent(2))


# ---------------------------------------------------------------------------
# probabilities


def test_probability_examples():
    assert exact_probability(4, EMPTY_PATTERNS, ClusterEvent(2, 1)) == Fraction(1, 2)
    assert exact_probability(5, ps_of("321"), ClusterEvent(2, 1)) == Fraction(19, 42)


def test_probability_mirror_classes_agree():
    for n in range(3, 8):
        for l in range(2, n):
            for k in range(1, n - l + 2):
                ev = ClusterEvent(l, k)
                assert exact_probability(n, ps_of("321"), ev) == exact_probability(n, ps_of("123"), ev)


def test_probability_requires_exactly_one_event_form():
    with pytest.raises(DomainError):
        exact_probability(5, EMPTY_PATTERNS)
    with pytest.raises(DomainError):
        exact_probability(5, EMPTY_PATTERNS, ClusterEvent(2, 1), union_l=2)


def test_per_anchor_structure_for_321():
    # anchored counts match the position-value census of the contracted
    # class, with the extra diagonal term C_{k-1} C_{n-k-l+1} (C_l - 1)
    ps = ps_of("321")
    for n in range(3, 11):
        table = event_count_table(n, ps)
        pv = {m: enumeration.position_value_counts(m, ps) for m in {n - l + 1 for l in range(2, n)}}
        for l in range(2, n):
            census = pv[n - l + 1]
            for k in range(1, n - l + 2):
                for a in range(1, n - l + 2):
                    expected = int(census[a - 1, k - 1])
                    if a == k:
                        expected += catalan(k - 1) * catalan(n - k - l + 1) * (catalan(l) - 1)
                    assert table.by_lka.get((l, k, a), 0) == expected, (n, l, k, a)


# ---------------------------------------------------------------------------
# ratio sequences


def test_ratio_sequence_catalan():
    ratios = ratio_sequence(ps_of("321"), 10)
    for n, r in enumerate(ratios, start=1):
        assert r == Fraction(2 * (2 * n + 1), n + 2)


def test_ratio_sequence_catalan_trend():
    ratios = ratio_sequence(ps_of("321"), 25)
    at_20 = ratios[19]
    assert abs(float(at_20) - 3.7273) < 5e-4
    assert all(a < b for a, b in zip(ratios, ratios[1:]))
    assert all(r < 4 for r in ratios)


def test_ratio_sequence_separable_trend():
    ratios = ratio_sequence(SEP, 60)
    growth = 3 + 2 * math.sqrt(2)
    assert all(a < b for a, b in zip(ratios, ratios[1:]))
    assert float(ratios[-1]) < growth
    assert growth - float(ratios[-1]) < 0.2


def test_ratio_sequence_needs_two_terms():
    with pytest.raises(DomainError):
        ratio_sequence(SEP, 1)


# ---------------------------------------------------------------------------
# the persistent cache


def test_cache_round_trip(tmp_path):
    path = tmp_path / "counts.txt"
    cache = CountCache(path)
    assert cache.get("avoid=321;n=5") is None
    count_avoiders(5, ps_of("321"), cache=cache)
    assert CountCache(path).get("avoid=321;n=5") == 42


def test_cache_ignores_corrupt_lines(tmp_path):
    path = tmp_path / "counts.txt"
    path.write_text(
        "avoid=321;n=4\t14\n"
        "garbage line\n"
        "avoid=321;n=5\tnotanumber\n"
        "avoid=;n=oops\t3\n"
        "avoid=999;n=3\t7\n"
    )
    cache = CountCache(path)
    assert cache.get("avoid=321;n=4") == 14
    assert cache.get("avoid=321;n=5") is None
    assert count_avoiders(5, ps_of("321"), cache=cache) == 42


def test_cache_key_round_trip():
    for ps in [ps_of("321"), SEP, ps_of("1342", "321"), PatternSet((Permutation(tuple(range(1, 11))),))]:
        key = enumeration.cache_key(7, ps)
        n, back = enumeration.parse_cache_key(key)
        assert n == 7 and back == ps


def test_cached_value_is_used(tmp_path):
    # a planted (wrong) value is trusted by count_avoiders and exposed by audit
    path = tmp_path / "counts.txt"
    path.write_text("avoid=53421;n=5\t999\n")
    cache = CountCache(path)
    assert count_avoiders(5, ps_of("53421"), cache=cache) == 999
    assert enumeration.fresh_count(5, ps_of("53421")) == 119


# ---------------------------------------------------------------------------
# work splitting


def test_parallel_event_table_matches_serial():
    ps = ps_of("132")
    serial = event_count_table(8, ps)
    enumeration._EVENT_MEMO.pop((8, ps.key()), None)
    parallel = event_count_table(8, ps, jobs=2)
    assert parallel.total == serial.total
    assert parallel.by_lk == serial.by_lk
    assert parallel.by_lka == serial.by_lka
    assert parallel.union_by_l == serial.union_by_l


def test_parallel_fresh_count_matches_serial():
    assert enumeration.fresh_count(8, ps_of("231"), jobs=2) == catalan(8)


# ---------------------------------------------------------------------------
# bulk helpers


def test_contains_pattern_rows_matches_scalar():
    rng = np.random.default_rng(7)
    for tau_text in ("321", "2413", "1234"):
        tau = parse_permutation(tau_text)
        rows = np.array([rng.permutation(8) + 1 for _ in range(300)], dtype=np.int8)
        got = enumeration.contains_pattern_rows(rows, tau)
        for row, flag in zip(rows, got):
            p = Permutation(tuple(int(v) for v in row))
            assert bool(flag) == (not avoids_all(p, PatternSet((tau,))))


def test_flatten_rows_matches_scalar():
    from permcluster import flatten

    rng = np.random.default_rng(11)
    words = np.array([rng.choice(50, size=6, replace=False) + 1 for _ in range(40)])
    arr = enumeration.flatten_rows(words.astype(np.int64))
    for word, flat in zip(words, arr):
        assert tuple(int(v) for v in flat) == flatten(tuple(int(v) for v in word)).values
