"""Exhaustive generation and exact counting over S_n and S_n(patterns).

The enumerator grows avoiders length by length.  Because avoidance only
depends on relative order, each level holds the full numpy array of
avoiding patterns of that length; a length-j avoider is extended by
appending a new last entry of rank r in 1..j+1 (existing values >= r are
bumped up by one).  Since the parent already avoids everything, the child
survives iff the appended entry does not complete a forbidden occurrence
ending at the last position, and that test reduces per candidate
occurrence to an interval of bad ranks, which we accumulate as a bitmask
per row.  At the final level the rows are exactly S_n(patterns).

Event counts (which blocks of l consecutive values sit in l consecutive
positions) are tabulated from the leaf rows with sliding window min/max
scans; a window is a cluster iff max - min = l - 1, and the block start k
is then the window minimum.  For a fixed l, the block determines its
positions, so per permutation each (l, k) and each (l, k, a) occurs at
most once and bin counting rows counts permutations.

Counting fast paths (factorial for the empty set, Catalan for a single
length-3 pattern, a Schroeder-type linear recurrence for the separable
class) are only used for n above the enumeration range after the closed
form has been validated against enumerated counts for n <= 10 in the same
process; otherwise they fall back to enumeration.

All counting is exact integer arithmetic; probabilities are Fractions.
Work splitting partitions an intermediate level's rows into disjoint
chunks whose subtree results are merged by addition, so parallel runs are
pure and deterministic.
"""

from __future__ import annotations

import itertools
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Iterator

import numpy as np

from .perms import (
    SEP,
    ClusterEvent,
    DomainError,
    ParseError,
    PatternSet,
    Permutation,
    UndefinedProbabilityError,
    parse_permutation,
)

_CHUNK_ROWS = 1 << 16
_MAX_ENUM_N = 60  # rank bitmasks are uint64
_FAST_PATH_MIN = 11  # strictly below this, always enumerate
_VALIDATE_UPTO = 10

BigCount = int
ExactRatio = Fraction


def _catalan(n: int) -> int:
    return math.comb(2 * n, n) // (n + 1)


# ---------------------------------------------------------------------------
# vectorized "does the appended rank complete a forbidden occurrence" test


@dataclass(frozen=True)
class _PatternMeta:
    length: int
    # order profile of the pattern minus its last entry: (s, u, s_below_u)
    pairs: tuple[tuple[int, int, bool], ...]
    under: tuple[int, ...]  # head slots valued below the last entry
    over: tuple[int, ...]  # head slots valued above the last entry


def _pattern_meta(tau: Permutation) -> _PatternMeta:
    t = tau.values
    m = len(t)
    head = t[:-1]
    pairs = tuple(
        (s, u, head[s] < head[u]) for s in range(m - 1) for u in range(s + 1, m - 1)
    )
    under = tuple(i for i in range(m - 1) if head[i] < t[-1])
    over = tuple(i for i in range(m - 1) if head[i] > t[-1])
    return _PatternMeta(m, pairs, under, over)


def _rank_interval_lut(n: int) -> np.ndarray:
    # lut[lo, hi] has bits lo+1 .. hi set: the ranks r with lo < r <= hi.
    size = n + 2
    lut = np.zeros((size, size), dtype=np.uint64)
    for lo in range(size):
        for hi in range(lo + 1, size):
            lut[lo, hi] = ((1 << (hi + 1)) - 2) & ~((1 << (lo + 1)) - 2)
    return lut


def _bad_rank_masks(rows: np.ndarray, metas: list[_PatternMeta], lut: np.ndarray) -> np.ndarray:
    """Bitmask per row of the ranks whose append would contain a pattern.

    A new last entry of rank r completes an occurrence of tau iff some
    (m-1)-subset of columns matches the head of tau in relative order and
    r falls strictly above every matched under-value and at or below every
    matched over-value (after bumping, `value >= r` means `above r`).
    """
    n_rows, j = rows.shape
    bad = np.zeros(n_rows, dtype=np.uint64)
    for meta in metas:
        w = meta.length - 1
        if w > j:
            continue
        combos = np.array(list(itertools.combinations(range(j), w)), dtype=np.intp)
        cols = rows[:, combos]  # (N, T, w)
        ok = np.ones(cols.shape[:2], dtype=bool)
        for s, u, below in meta.pairs:
            cmp = cols[:, :, s] < cols[:, :, u]
            ok &= cmp if below else ~cmp
        if meta.under:
            lo = cols[:, :, meta.under].max(axis=2).astype(np.intp)
        else:
            lo = np.zeros(cols.shape[:2], dtype=np.intp)
        if meta.over:
            hi = cols[:, :, meta.over].min(axis=2).astype(np.intp)
        else:
            hi = np.full(cols.shape[:2], j + 1, dtype=np.intp)
        bits = np.where(ok, lut[lo, hi], np.uint64(0))
        bad |= np.bitwise_or.reduce(bits, axis=1)
    return bad


def _extend_rows(rows: np.ndarray, metas: list[_PatternMeta], lut: np.ndarray) -> np.ndarray:
    """All avoiding children obtained by appending a new last entry."""
    n_rows, j = rows.shape
    out = []
    for start in range(0, n_rows, _CHUNK_ROWS):
        chunk = rows[start : start + _CHUNK_ROWS]
        if metas:
            bad = _bad_rank_masks(chunk, metas, lut)
        else:
            bad = np.zeros(len(chunk), dtype=np.uint64)
        for r in range(1, j + 2):
            keep = (np.right_shift(bad, np.uint64(r)) & np.uint64(1)) == 0
            base = chunk[keep]
            if not len(base):
                continue
            child = (base + (base >= r)).astype(rows.dtype)
            col = np.full((len(child), 1), r, dtype=rows.dtype)
            out.append(np.hstack([child, col]))
    if not out:
        return np.empty((0, j + 1), dtype=rows.dtype)
    return np.vstack(out)


def _grow_rows(rows: np.ndarray, n: int, ps: PatternSet) -> np.ndarray:
    metas = [_pattern_meta(t) for t in ps]
    lut = _rank_interval_lut(n)
    while rows.shape[1] < n:
        rows = _extend_rows(rows, metas, lut)
    return rows


def _avoider_rows(n: int, ps: PatternSet) -> np.ndarray:
    """Array of all members of S_n(ps), one row per permutation (unsorted)."""
    if n < 1:
        raise DomainError("enumeration needs n >= 1")
    if n > _MAX_ENUM_N:
        raise DomainError(f"enumeration supports n <= {_MAX_ENUM_N}")
    return _grow_rows(np.ones((1, 1), dtype=np.int8), n, ps)


# ---------------------------------------------------------------------------
# bulk containment and flattening helpers (used by the verification suites)


def contains_pattern_rows(rows: np.ndarray, tau: Permutation) -> np.ndarray:
    """Vectorized containment: for each row, does it contain tau anywhere."""
    t = tau.values
    m = len(t)
    n_rows, w = rows.shape
    hit = np.zeros(n_rows, dtype=bool)
    if m > w or n_rows == 0:
        return hit
    combos = np.array(list(itertools.combinations(range(w), m)), dtype=np.intp)
    rel = [(s, u, t[s] < t[u]) for s in range(m) for u in range(s + 1, m)]
    for start in range(0, n_rows, _CHUNK_ROWS):
        sl = slice(start, start + _CHUNK_ROWS)
        cols = rows[sl][:, combos]  # (N, T, m)
        ok = np.ones(cols.shape[:2], dtype=bool)
        for s, u, below in rel:
            cmp = cols[:, :, s] < cols[:, :, u]
            ok &= cmp if below else ~cmp
        hit[sl] = ok.any(axis=1)
    return hit


def flatten_rows(rows: np.ndarray) -> np.ndarray:
    """Row-wise order-isomorphic patterns (values 1..width)."""
    order = np.argsort(rows, axis=1, kind="stable")
    out = np.empty_like(rows)
    np.put_along_axis(out, order, np.arange(1, rows.shape[1] + 1, dtype=rows.dtype)[None, :], axis=1)
    return out


# ---------------------------------------------------------------------------
# event tabulation


@dataclass
class EventTable:
    """Exact counts of avoiders in every cluster event at one (n, patterns)."""

    n: int
    patterns_key: str
    total: int
    by_lk: dict[tuple[int, int], int]
    by_lka: dict[tuple[int, int, int], int]
    union_by_l: dict[int, int]


def _accumulate_events(rows: np.ndarray, by_lk, by_lka, union_by_l) -> None:
    n_rows, n = rows.shape
    if n_rows == 0:
        return
    cmin = rows
    cmax = rows
    for l in range(2, n):
        cmin = np.minimum(cmin[:, :-1], rows[:, l - 1 :])
        cmax = np.maximum(cmax[:, :-1], rows[:, l - 1 :])
        cluster = (cmax - cmin) == (l - 1)
        if not cluster.any():
            continue
        union_by_l[l] = union_by_l.get(l, 0) + int(cluster.any(axis=1).sum())
        ridx, aidx = np.nonzero(cluster)
        ks = cmin[ridx, aidx].astype(np.int64)
        code = ks * (n + 2) + (aidx + 1)
        uniq, counts = np.unique(code, return_counts=True)
        for c, cnt in zip(uniq.tolist(), counts.tolist()):
            k, a = divmod(c, n + 2)
            by_lka[(l, k, a)] = by_lka.get((l, k, a), 0) + cnt
            by_lk[(l, k)] = by_lk.get((l, k), 0) + cnt


def _all_perm_chunks(n: int, chunk: int = _CHUNK_ROWS) -> Iterator[np.ndarray]:
    it = itertools.permutations(range(1, n + 1))
    while True:
        flat = np.fromiter(
            itertools.chain.from_iterable(itertools.islice(it, chunk)),
            dtype=np.int8,
        )
        if flat.size == 0:
            return
        yield flat.reshape(-1, n)


def _tabulate(n: int, key: str, row_chunks: Iterator[np.ndarray]) -> EventTable:
    by_lk: dict[tuple[int, int], int] = {}
    by_lka: dict[tuple[int, int, int], int] = {}
    union_by_l: dict[int, int] = {}
    total = 0
    for rows in row_chunks:
        total += len(rows)
        _accumulate_events(rows, by_lk, by_lka, union_by_l)
    return EventTable(n, key, total, by_lk, by_lka, union_by_l)


def _merge_tables(parts: list[EventTable]) -> EventTable:
    first = parts[0]
    out = EventTable(first.n, first.patterns_key, 0, {}, {}, {})
    for p in parts:
        out.total += p.total
        for d_out, d_in in (
            (out.by_lk, p.by_lk),
            (out.by_lka, p.by_lka),
            (out.union_by_l, p.union_by_l),
        ):
            for kk, v in d_in.items():
                d_out[kk] = d_out.get(kk, 0) + v
    return out


def _worker_table(args: tuple[np.ndarray, int, tuple[tuple[int, ...], ...]]) -> EventTable:
    rows, n, pattern_values = args
    ps = PatternSet(tuple(Permutation(v) for v in pattern_values))
    leaves = _grow_rows(rows, n, ps)
    return _tabulate(n, ps.key(), iter([leaves]))


_EVENT_MEMO: dict[tuple[int, str], EventTable] = {}
_COUNT_MEMO: dict[str, int] = {}


def event_count_table(n: int, ps: PatternSet, *, jobs: int = 1, cache: "CountCache | None" = None) -> EventTable:
    """Counts of S_n(ps) members in every cluster event, from one full pass."""
    if n < 1:
        raise DomainError("event tables need n >= 1")
    memo_key = (n, ps.key())
    hit = _EVENT_MEMO.get(memo_key)
    if hit is not None:
        if cache is not None and not ps.is_empty() and cache.get(cache_key(n, ps)) is None:
            cache.put(cache_key(n, ps), hit.total)
        return hit
    if ps.is_empty():
        if n > 11:
            raise DomainError(
                f"exhaustive event tables over all of S_{n} are out of reach (n! rows); n <= 11"
            )
        table = _tabulate(n, ps.key(), _all_perm_chunks(n))
    elif jobs > 1:
        rows = np.ones((1, 1), dtype=np.int8)
        metas = [_pattern_meta(t) for t in ps]
        lut = _rank_interval_lut(n)
        while rows.shape[1] < n and len(rows) < 4 * jobs:
            rows = _extend_rows(rows, metas, lut)
        if rows.shape[1] == n:
            table = _tabulate(n, ps.key(), iter([rows]))
        else:
            chunks = [c for c in np.array_split(rows, jobs) if len(c)]
            pattern_values = tuple(t.values for t in ps)
            with ProcessPoolExecutor(max_workers=jobs) as pool:
                parts = list(pool.map(_worker_table, [(c, n, pattern_values) for c in chunks]))
            table = _merge_tables(parts)
    else:
        table = _tabulate(n, ps.key(), iter([_avoider_rows(n, ps)]))
    _EVENT_MEMO[memo_key] = table
    _COUNT_MEMO[cache_key(n, ps)] = table.total
    if cache is not None and not ps.is_empty():
        cache.put(cache_key(n, ps), table.total)
    return table


def position_value_counts(n: int, ps: PatternSet) -> np.ndarray:
    """counts[a-1, k-1] = number of members of S_n(ps) with value k at position a."""
    rows = _avoider_rows(n, ps) if not ps.is_empty() else np.vstack(list(_all_perm_chunks(n)))
    out = np.zeros((n, n), dtype=np.int64)
    for a in range(n):
        out[a] = np.bincount(rows[:, a], minlength=n + 1)[1:]
    return out


# ---------------------------------------------------------------------------
# the persistent count cache


def cache_key(n: int, ps: PatternSet) -> str:
    return f"avoid={ps.key()};n={n}"


def parse_cache_key(key: str) -> tuple[int, PatternSet]:
    if not key.startswith("avoid=") or ";n=" not in key:
        raise ParseError(f"bad cache key {key!r}")
    avoid_part, n_part = key[len("avoid=") :].rsplit(";n=", 1)
    if not n_part.isdigit():
        raise ParseError(f"bad cache key {key!r}")
    patterns = tuple(parse_permutation(p) for p in avoid_part.split("+")) if avoid_part else ()
    return int(n_part), PatternSet(patterns)


class CountCache:
    """A persistent text map from cache keys to decimal count strings.

    One entry per line, key and value separated by a tab.  Corrupt lines
    are ignored (and their keys recomputed on demand).  Writes re-read the
    file, merge, and replace it atomically: concurrent readers are safe and
    concurrent writers of identical values are last-writer-wins.
    """

    def __init__(self, path: str | Path):
        self.path = Path(path)
        self._data: dict[str, int] | None = None

    def _parse_file(self) -> dict[str, int]:
        data: dict[str, int] = {}
        try:
            text = self.path.read_text()
        except OSError:
            return data
        for line in text.splitlines():
            if not line.strip():
                continue
            parts = line.split("\t")
            if len(parts) != 2 or not parts[1].strip().isdigit():
                continue  # corrupt entry: ignore, recompute later
            try:
                parse_cache_key(parts[0])
            except (ParseError, ValueError):
                continue
            data[parts[0]] = int(parts[1])
        return data

    def _load(self) -> dict[str, int]:
        if self._data is None:
            self._data = self._parse_file()
        return self._data

    def get(self, key: str) -> int | None:
        return self._load().get(key)

    def put(self, key: str, value: int) -> None:
        merged = self._parse_file()
        merged.update(self._load())
        merged[key] = value
        self._data = merged
        self.path.parent.mkdir(parents=True, exist_ok=True)
        tmp = self.path.with_suffix(self.path.suffix + ".tmp")
        with open(tmp, "w") as fh:
            for k in sorted(merged):
                fh.write(f"{k}\t{merged[k]}\n")
        os.replace(tmp, self.path)

    def items(self) -> list[tuple[str, int]]:
        return sorted(self._load().items())


# ---------------------------------------------------------------------------
# counting


def fresh_count(n: int, ps: PatternSet, *, jobs: int = 1) -> int:
    """Count by enumeration only, bypassing memos, caches and fast paths."""
    if n == 0:
        return 1
    if ps.is_empty():
        return math.factorial(n)
    if jobs > 1:
        return _fresh_count_jobs(n, ps, jobs)
    return len(_avoider_rows(n, ps))


def _fresh_count_jobs(n: int, ps: PatternSet, jobs: int) -> int:
    rows = np.ones((1, 1), dtype=np.int8)
    metas = [_pattern_meta(t) for t in ps]
    lut = _rank_interval_lut(n)
    while rows.shape[1] < n and len(rows) < 4 * jobs:
        rows = _extend_rows(rows, metas, lut)
    if rows.shape[1] == n:
        return len(rows)
    chunks = [c for c in np.array_split(rows, jobs) if len(c)]
    pattern_values = tuple(t.values for t in ps)
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        parts = list(pool.map(_worker_count, [(c, n, pattern_values) for c in chunks]))
    return sum(parts)


def _worker_count(args: tuple[np.ndarray, int, tuple[tuple[int, ...], ...]]) -> int:
    rows, n, pattern_values = args
    ps = PatternSet(tuple(Permutation(v) for v in pattern_values))
    return len(_grow_rows(rows, n, ps))


def _enumerated_count(n: int, ps: PatternSet, cache: CountCache | None, jobs: int) -> int:
    key = cache_key(n, ps)
    hit = _COUNT_MEMO.get(key)
    if hit is not None:
        if cache is not None and cache.get(key) is None:
            cache.put(key, hit)
        return hit
    if cache is not None:
        cached = cache.get(key)
        if cached is not None:
            _COUNT_MEMO[key] = cached
            return cached
    value = fresh_count(n, ps, jobs=jobs)
    _COUNT_MEMO[key] = value
    if cache is not None:
        cache.put(key, value)
    return value


_VALIDATED_FAST_PATHS: set[str] = set()


def _schroeder_counts(n: int) -> list[int]:
    # d[q] = |separable permutations of length q|; exact integer recurrence.
    d = [0] * (n + 1)
    d[1] = 1
    if n >= 2:
        d[2] = 2
    for q in range(3, n + 1):
        num = 3 * (2 * q - 3) * d[q - 1] - (q - 3) * d[q - 2]
        d[q] = num // q
    return d


def _catalan_fast(n: int, tau: Permutation, cache: CountCache | None, jobs: int) -> int | None:
    tag = "catalan:" + tau.text()
    if tag not in _VALIDATED_FAST_PATHS:
        ps = PatternSet((tau,))
        if any(_enumerated_count(j, ps, cache, jobs) != _catalan(j) for j in range(1, _VALIDATE_UPTO + 1)):
            return None
        _VALIDATED_FAST_PATHS.add(tag)
    return _catalan(n)


def _separable_fast(n: int, cache: CountCache | None, jobs: int) -> int | None:
    tag = "separable"
    if tag not in _VALIDATED_FAST_PATHS:
        d = _schroeder_counts(_VALIDATE_UPTO)
        if any(_enumerated_count(j, SEP, cache, jobs) != d[j] for j in range(1, _VALIDATE_UPTO + 1)):
            return None
        _VALIDATED_FAST_PATHS.add(tag)
    return _schroeder_counts(n)[n]


def count_avoiders(n: int, ps: PatternSet, *, cache: CountCache | None = None, jobs: int = 1) -> int:
    """|S_n(ps)| exactly.  n = 0 counts the empty permutation once."""
    if n < 0:
        raise DomainError("counting needs n >= 0")
    if n == 0:
        return 1
    if ps.is_empty():
        return math.factorial(n)
    if n >= _FAST_PATH_MIN:
        if len(ps) == 1 and len(ps.patterns[0]) == 3:
            value = _catalan_fast(n, ps.patterns[0], cache, jobs)
            if value is not None:
                return value
        elif ps == SEP:
            value = _separable_fast(n, cache, jobs)
            if value is not None:
                return value
    return _enumerated_count(n, ps, cache, jobs)


def enumerate_avoiders(n: int, ps: PatternSet) -> Iterator[Permutation]:
    """Yield S_n(ps) exactly once each, in lexicographic one-line order."""
    if n < 1:
        raise DomainError("enumeration needs n >= 1")
    if ps.is_empty():
        for vals in itertools.permutations(range(1, n + 1)):
            yield Permutation(vals)
        return
    rows = _avoider_rows(n, ps)
    if not len(rows):
        return
    order = np.lexsort(rows.T[::-1])
    for row in rows[order]:
        yield Permutation(tuple(int(v) for v in row))


# ---------------------------------------------------------------------------
# event counts and exact probabilities


def count_event(n: int, ps: PatternSet, event: ClusterEvent, *, cache: CountCache | None = None, jobs: int = 1) -> int:
    """Exact count of S_n(ps) members in the (anchored) cluster event."""
    event.validate(n)
    if event.k is None:
        raise DomainError("count_event needs k; use count_union_event for the union")
    table = event_count_table(n, ps, jobs=jobs, cache=cache)
    if event.a is not None:
        return table.by_lka.get((event.l, event.k, event.a), 0)
    return table.by_lk.get((event.l, event.k), 0)


def count_union_event(n: int, ps: PatternSet, l: int, *, cache: CountCache | None = None, jobs: int = 1) -> int:
    """Exact count of S_n(ps) members with some block of l consecutive values
    in consecutive positions (the union of the events over k)."""
    ClusterEvent(l).validate(n)
    table = event_count_table(n, ps, jobs=jobs, cache=cache)
    return table.union_by_l.get(l, 0)


def exact_probability(
    n: int,
    ps: PatternSet,
    event: ClusterEvent | None = None,
    *,
    union_l: int | None = None,
    cache: CountCache | None = None,
    jobs: int = 1,
) -> Fraction:
    """Exact probability of a cluster event under the uniform measure on S_n(ps)."""
    if (event is None) == (union_l is None):
        raise DomainError("give exactly one of an event or union_l")
    table = event_count_table(n, ps, jobs=jobs, cache=cache)
    if table.total == 0:
        raise UndefinedProbabilityError(f"S_{n}({ps}) is empty")
    if union_l is not None:
        hits = count_union_event(n, ps, union_l, cache=cache, jobs=jobs)
    else:
        hits = count_event(n, ps, event, cache=cache, jobs=jobs)
    return Fraction(hits, table.total)


def ratio_sequence(ps: PatternSet, n_max: int, *, cache: CountCache | None = None) -> list[Fraction]:
    """The consecutive-count ratios |S_{n+1}(ps)| / |S_n(ps)| for n = 1..n_max-1."""
    if n_max < 2:
        raise DomainError("ratio_sequence needs n_max >= 2")
    counts = [count_avoiders(n, ps, cache=cache) for n in range(1, n_max + 1)]
    return [Fraction(b, a) for a, b in zip(counts, counts[1:])]
