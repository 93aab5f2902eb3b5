"""Permutations in one-line notation and the pointwise structure predicates.

A permutation of [n] = {1, ..., n} is stored as the tuple of its values
(s_1, ..., s_n).  This module defines the basic objects (Permutation,
PatternSet, ClusterEvent) and the predicates everything else is built on:
classical pattern containment, tight containment (a contiguous,
value-shifted copy), clusters of consecutive values sitting in consecutive
positions, cluster-freeness, and separability.

All values are immutable and every operation is a pure function, so the
module is safe for unrestricted concurrent use.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

__all__ = [
    "ApplicabilityError",
    "ClusterEvent",
    "ConditionReport",
    "DomainError",
    "EMPTY_PATTERNS",
    "ParseError",
    "PatternSet",
    "Permutation",
    "SEP",
    "UndefinedProbabilityError",
    "avoids_all",
    "check_conditions",
    "complement",
    "contains_pattern",
    "identity",
    "in_any_cluster_event",
    "in_cluster_event",
    "is_cluster_free",
    "is_separable",
    "parse_permutation",
    "reverse",
    "tight_contains",
]


class ParseError(ValueError):
    """Malformed permutation or pattern text."""


class DomainError(ValueError):
    """Arguments outside the range where an operation is defined."""


class ApplicabilityError(DomainError):
    """A closed form was requested for inputs its hypotheses do not cover."""


class UndefinedProbabilityError(DomainError):
    """A probability was requested over an empty class."""


@dataclass(frozen=True, order=True)
class Permutation:
    """A permutation of [n] in one-line notation, values 1..n."""

    values: tuple[int, ...]

    def __post_init__(self) -> None:
        vals = tuple(int(v) for v in self.values)
        object.__setattr__(self, "values", vals)
        n = len(vals)
        if n == 0:
            raise ParseError("a permutation needs at least one value")
        if sorted(vals) != list(range(1, n + 1)):
            raise ParseError(f"{vals} is not a bijection of 1..{n}")

    @property
    def n(self) -> int:
        return len(self.values)

    def __len__(self) -> int:
        return len(self.values)

    def __iter__(self) -> Iterator[int]:
        return iter(self.values)

    def __getitem__(self, i: int) -> int:
        return self.values[i]

    def text(self) -> str:
        """One-line notation: compact digits for n <= 9, else space separated."""
        if len(self.values) <= 9:
            return "".join(str(v) for v in self.values)
        return " ".join(str(v) for v in self.values)

    def __str__(self) -> str:
        return self.text()

    def __repr__(self) -> str:
        return f"Permutation({self.text()!r})"


def identity(n: int) -> Permutation:
    """The identity permutation 12...n."""
    if n < 1:
        raise DomainError("identity needs n >= 1")
    return Permutation(tuple(range(1, n + 1)))


def parse_permutation(text: str) -> Permutation:
    """Parse one-line notation.

    A compact digit string is read one digit per value and is only
    meaningful for n <= 9; longer permutations must be written with a
    single separator style, either commas or whitespace.

    >>> parse_permutation("798645312").values
    (7, 9, 8, 6, 4, 5, 3, 1, 2)
    >>> parse_permutation("10 2 1 3 4 5 6 7 8 9").n
    10
    """
    s = text.strip()
    if not s:
        raise ParseError("empty permutation text")
    if "," in s:
        tokens = []
        for raw in s.split(","):
            tok = raw.strip()
            if not tok:
                raise ParseError(f"empty token in {text!r}")
            if any(ch.isspace() for ch in tok):
                raise ParseError(f"mixed separators at token {tok!r}")
            tokens.append(tok)
    else:
        tokens = s.split()
    for tok in tokens:
        if not tok.isdigit():
            raise ParseError(f"bad token {tok!r}")
    if len(tokens) == 1 and len(tokens[0]) > 1:
        values = tuple(int(ch) for ch in tokens[0])
    else:
        values = tuple(int(tok) for tok in tokens)
    return Permutation(values)


@dataclass(frozen=True)
class PatternSet:
    """A canonically ordered set of forbidden patterns.

    The empty set is allowed and means "no constraint" (all of S_n).
    """

    patterns: tuple[Permutation, ...] = ()

    def __post_init__(self) -> None:
        pats = tuple(sorted(self.patterns, key=lambda p: p.values))
        object.__setattr__(self, "patterns", pats)
        seen = set()
        for p in pats:
            if len(p) < 2:
                raise ParseError(f"pattern {p} is shorter than 2")
            if p.values in seen:
                raise ParseError(f"duplicate pattern {p}")
            seen.add(p.values)

    def is_empty(self) -> bool:
        return not self.patterns

    def __iter__(self) -> Iterator[Permutation]:
        return iter(self.patterns)

    def __len__(self) -> int:
        return len(self.patterns)

    def key(self) -> str:
        """Canonical text form, used for cache keys: patterns joined by '+'."""
        return "+".join(p.text() for p in self.patterns)

    def __str__(self) -> str:
        return self.key() or "(none)"


EMPTY_PATTERNS = PatternSet(())

#: The separability constraint: avoid both 2413 and 3142.
SEP = PatternSet((Permutation((2, 4, 1, 3)), Permutation((3, 1, 4, 2))))


@dataclass(frozen=True)
class ClusterEvent:
    """The event that values k..k+l-1 occupy l consecutive positions.

    With the anchor `a` present the window is pinned to start at position
    `a` (1-based); without it any window position counts.  `k` may be
    omitted only when the event is used as the union over all k.
    """

    l: int
    k: int | None = None
    a: int | None = None

    def __post_init__(self) -> None:
        if self.a is not None and self.k is None:
            raise DomainError("an anchored event needs k")

    def validate(self, n: int) -> None:
        """Check the ranges for ambient size n, raising DomainError."""
        if not 2 <= self.l <= n - 1:
            raise DomainError(f"l={self.l} outside 2..{n - 1} for n={n}")
        top = n - self.l + 1
        if self.k is not None and not 1 <= self.k <= top:
            raise DomainError(f"k={self.k} outside 1..{top} for n={n}, l={self.l}")
        if self.a is not None and not 1 <= self.a <= top:
            raise DomainError(f"a={self.a} outside 1..{top} for n={n}, l={self.l}")


@dataclass(frozen=True)
class ConditionReport:
    """Structural flags of a pattern that control which bounds apply."""

    c1: bool
    c2: bool
    c3: bool
    tight12: bool
    tight21: bool
    cluster_free: bool


def contains_pattern(sigma: Permutation, tau: Permutation) -> bool:
    """True iff some subsequence of sigma is order-isomorphic to tau.

    Backtracking over candidate positions: each partial assignment keeps
    the feasible value window for the next pattern entry, which prunes
    most branches early.  A pattern longer than sigma is never contained.
    """
    s, t = sigma.values, tau.values
    n, m = len(s), len(t)
    if m > n:
        return False
    # For step j the value window is bounded by the already placed entries
    # whose pattern values are the nearest below/above t[j].
    low_src = [-1] * m
    high_src = [-1] * m
    for j in range(m):
        lo = hi = -1
        for i in range(j):
            if t[i] < t[j] and (lo < 0 or t[i] > t[lo]):
                lo = i
            if t[i] > t[j] and (hi < 0 or t[i] < t[hi]):
                hi = i
        low_src[j], high_src[j] = lo, hi
    chosen = [0] * m

    def place(j: int, start: int) -> bool:
        if j == m:
            return True
        lo = chosen[low_src[j]] if low_src[j] >= 0 else 0
        hi = chosen[high_src[j]] if high_src[j] >= 0 else n + 1
        for p in range(start, n - (m - j) + 1):
            v = s[p]
            if lo < v < hi:
                chosen[j] = v
                if place(j + 1, p + 1):
                    return True
        return False

    return place(0, 0)


def avoids_all(sigma: Permutation, ps: PatternSet) -> bool:
    """True iff sigma contains none of the patterns (vacuously true if none)."""
    return all(not contains_pattern(sigma, tau) for tau in ps)


def tight_contains(tau: Permutation, nu: Permutation) -> bool:
    """True iff tau holds a copy of nu in consecutive positions with
    consecutive values (a value-shifted contiguous copy)."""
    t, v = tau.values, nu.values
    j = len(v)
    for i in range(len(t) - j + 1):
        h = t[i] - v[0]
        if all(t[i + a] == h + v[a] for a in range(1, j)):
            return True
    return False


def _window_has_cluster(values: tuple[int, ...], l: int, k: int | None) -> bool:
    # A window of l distinct values is a cluster iff max - min = l - 1;
    # its block then starts at the window minimum.
    n = len(values)
    for a in range(n - l + 1):
        w = values[a : a + l]
        lo = min(w)
        if max(w) - lo == l - 1 and (k is None or lo == k):
            return True
    return False


def in_cluster_event(sigma: Permutation, event: ClusterEvent) -> bool:
    """Membership of sigma in the (anchored) cluster event."""
    n = len(sigma)
    event.validate(n)
    if event.k is None:
        raise DomainError("event needs k; use in_any_cluster_event for the union")
    l, k = event.l, event.k
    if event.a is not None:
        w = sigma.values[event.a - 1 : event.a - 1 + l]
        return min(w) == k and max(w) == k + l - 1
    return _window_has_cluster(sigma.values, l, k)


def in_any_cluster_event(sigma: Permutation, l: int) -> bool:
    """True iff some block of l consecutive values sits in l consecutive
    positions of sigma (the union of the events over all k)."""
    n = len(sigma)
    if not 2 <= l <= n - 1:
        raise DomainError(f"l={l} outside 2..{n - 1} for n={n}")
    return _window_has_cluster(sigma.values, l, None)


def is_cluster_free(tau: Permutation) -> bool:
    """True iff tau has no cluster of any length l in 2..m-1.

    For m <= 2 the range of l is empty, so the answer is vacuously true.
    """
    m = len(tau)
    return not any(_window_has_cluster(tau.values, l, None) for l in range(2, m))


def check_conditions(tau: Permutation) -> ConditionReport:
    """Evaluate the structural conditions of a pattern of length >= 2.

    c1: tau misses at least one of a tight ascent pair or a tight descent
    pair.  c2: an end of tau holds an extreme value.  c3: length >= 6, the
    four end entries form a block of consecutive values, and tau has
    exactly one tight ascent and one tight descent pair, sitting at the two
    ends in either order.
    """
    m = len(tau)
    if m < 2:
        raise DomainError("conditions are defined for length >= 2")
    t = tau.values
    asc = [i for i in range(m - 1) if t[i + 1] == t[i] + 1]
    desc = [i for i in range(m - 1) if t[i + 1] == t[i] - 1]
    tight12, tight21 = bool(asc), bool(desc)
    ends = (t[0], t[1], t[m - 2], t[m - 1]) if m >= 4 else ()
    c3 = (
        m >= 6
        and max(ends) - min(ends) == 3
        and len(asc) == 1
        and len(desc) == 1
        and {asc[0], desc[0]} == {0, m - 2}
    )
    return ConditionReport(
        c1=not (tight12 and tight21),
        c2=t[0] in (1, m) or t[m - 1] in (1, m),
        c3=c3,
        tight12=tight12,
        tight21=tight21,
        cluster_free=is_cluster_free(tau),
    )


def is_separable(sigma: Permutation) -> bool:
    """True iff sigma avoids both 2413 and 3142."""
    return avoids_all(sigma, SEP)


def reverse(sigma: Permutation) -> Permutation:
    """Reverse the positions of sigma (an involution)."""
    return Permutation(sigma.values[::-1])


def complement(sigma: Permutation) -> Permutation:
    """Replace each value v by n + 1 - v (an involution)."""
    n = len(sigma)
    return Permutation(tuple(n + 1 - v for v in sigma.values))
