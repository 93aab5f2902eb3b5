"""Ground-set relabelings and the cluster contraction / expansion maps.

`flatten` and `inflate` convert between words over an arbitrary finite set
B of positive integers and abstract patterns in S_|B|.  `contract`
collapses a cluster window of sigma to the single value k and flattens the
rest onto S_{n-l+1}; `expand` undoes this, inserting a chosen window
pattern rho in place of the value k.  For a fixed anchored event the two
maps are mutually inverse once the window pattern is recorded, and the
expansion map is injective in (eta, rho) jointly.

All functions are pure; the intermediate relabeled words are exposed
(`contraction_word`, `inflate`) so each step can be inspected directly.
"""

from __future__ import annotations

from typing import Sequence

from .perms import ClusterEvent, DomainError, Permutation, in_cluster_event

GroundSet = tuple[int, ...]
LabeledSequence = tuple[int, ...]


def _checked_ground(values: Sequence[int]) -> GroundSet:
    b = tuple(int(v) for v in values)
    if not b:
        raise DomainError("ground set must be non-empty")
    if b[0] < 1 or any(x >= y for x, y in zip(b, b[1:])):
        raise DomainError(f"ground set must be strictly increasing positives: {b}")
    return b


def flatten(word: Sequence[int]) -> Permutation:
    """The order-isomorphic pattern of a word with distinct entries.

    >>> flatten((7, 3, 8, 5)).text()
    '3142'
    """
    w = tuple(int(v) for v in word)
    if len(set(w)) != len(w):
        raise DomainError(f"word has repeated entries: {w}")
    rank = {v: i + 1 for i, v in enumerate(sorted(w))}
    return Permutation(tuple(rank[v] for v in w))


def inflate(nu: Permutation, ground: Sequence[int]) -> LabeledSequence:
    """Relabel nu onto a ground set: value i becomes the i-th smallest element.

    >>> inflate(Permutation((3, 1, 4, 2)), (3, 5, 7, 8))
    (7, 3, 8, 5)
    """
    b = _checked_ground(ground)
    if len(nu) != len(b):
        raise DomainError(f"pattern length {len(nu)} != ground set size {len(b)}")
    return tuple(b[v - 1] for v in nu.values)


def contraction_word(sigma: Permutation, l: int, k: int, a: int) -> LabeledSequence:
    """The word left after replacing the cluster window at (l, k, a) by k.

    The result is a word over {1, ..., k, k+l, ..., n} with k at position a.
    """
    if not in_cluster_event(sigma, ClusterEvent(l, k, a)):
        window = sigma.values[a - 1 : a - 1 + l]
        raise DomainError(
            f"positions {a}..{a + l - 1} of {sigma} hold {window}, not the block {k}..{k + l - 1}"
        )
    v = sigma.values
    return v[: a - 1] + (k,) + v[a - 1 + l :]


def contract(sigma: Permutation, l: int, k: int, a: int) -> Permutation:
    """Collapse the cluster window at (l, k, a) and flatten to S_{n-l+1}.

    The result eta satisfies eta_a = k, and avoidance of any pattern is
    preserved (contraction never creates new pattern content).
    """
    return flatten(contraction_word(sigma, l, k, a))


def expand(eta: Permutation, rho: Permutation, l: int, k: int, a: int) -> Permutation:
    """Insert the window pattern rho in place of the value k of eta.

    eta must satisfy eta_a = k and |rho| = l; the result lives in S_n with
    n = |eta| + l - 1 and lies in the anchored cluster event (l, k, a).
    """
    if len(rho) != l:
        raise DomainError(f"window pattern has length {len(rho)}, expected l={l}")
    n = len(eta) + l - 1
    ClusterEvent(l, k, a).validate(n)
    if eta.values[a - 1] != k:
        raise DomainError(f"eta_{a} = {eta.values[a - 1]} != k = {k}")
    ground = tuple(range(1, k + 1)) + tuple(range(k + l, n + 1))
    word = inflate(eta, ground)
    out = word[: a - 1] + tuple(k - 1 + r for r in rho.values) + word[a:]
    return Permutation(out)


def cluster_anchors(sigma: Permutation, l: int, k: int) -> list[int]:
    """All anchors a such that sigma lies in the event (l, k, a).

    The block {k, ..., k+l-1} occupies a fixed set of positions, so the
    list has at most one element; it is returned as a list for uniformity.
    """
    ClusterEvent(l, k).validate(len(sigma))
    v = sigma.values
    out = []
    for a in range(len(v) - l + 1):
        w = v[a : a + l]
        if min(w) == k and max(w) == k + l - 1:
            out.append(a + 1)
    return out
