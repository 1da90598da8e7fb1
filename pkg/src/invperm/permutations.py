"""Permutations, inversion sequences, and block structure.

A permutation is a tuple of the integers 1..n in one-line notation.  Its
inversion sequence x has x_i = #{j < i : sigma(j) > sigma(i)}, so
0 <= x_i <= i-1, and the map is a bijection.  Decomposition points of the
inversion sequence cut the permutation into indecomposable blocks, which
are exactly the connected components of the graph whose edges are the
inversion pairs.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np


def validate_permutation(word: Sequence[int]) -> None:
    n = len(word)
    if n == 0:
        raise ValueError("empty permutation")
    seen = [False] * (n + 1)
    for v in word:
        if not 1 <= v <= n or seen[v]:
            raise ValueError(f"{tuple(word)} is not a permutation of 1..{n}")
        seen[v] = True


def validate_inversion_sequence(x: Sequence[int]) -> None:
    for i, v in enumerate(x, start=1):
        if not 0 <= v <= i - 1:
            raise ValueError(f"x[{i}]={v} violates 0 <= x_i <= i-1")


class _Fenwick:
    """Fenwick tree over 1..n supporting prefix sums and k-th order lookup."""

    def __init__(self, n: int):
        self.n = n
        self.tree = [0] * (n + 1)
        # highest power of two <= n, for the k-th element bit walk
        self.top = 1 << (n.bit_length() - 1) if n else 0

    def add(self, i: int, delta: int) -> None:
        while i <= self.n:
            self.tree[i] += delta
            i += i & -i

    def prefix(self, i: int) -> int:
        total = 0
        while i > 0:
            total += self.tree[i]
            i -= i & -i
        return total

    def kth(self, k: int) -> int:
        """Smallest index i with prefix(i) >= k (k is 1-based)."""
        pos = 0
        step = self.top
        while step:
            nxt = pos + step
            if nxt <= self.n and self.tree[nxt] < k:
                pos = nxt
                k -= self.tree[nxt]
            step >>= 1
        return pos + 1


def inversion_sequence(perm: Sequence[int]) -> list[int]:
    """Inversion sequence of a permutation, O(n log n).

    >>> inversion_sequence((2, 3, 1, 7, 6, 4, 9, 8, 5))
    [0, 0, 2, 0, 1, 2, 0, 1, 4]
    """
    validate_permutation(perm)
    n = len(perm)
    fen = _Fenwick(n)
    x = []
    for i, v in enumerate(perm):
        # earlier values larger than v = (#seen so far) - (#seen <= v)
        x.append(i - fen.prefix(v))
        fen.add(v, 1)
    return x


def permutation_from_inversion_sequence(x: Sequence[int]) -> tuple[int, ...]:
    """Inverse of :func:`inversion_sequence`, O(n log n).

    Fills positions n down to 1: position t receives the (1+x_t)-th
    largest value still unused.

    >>> permutation_from_inversion_sequence([0, 0, 2, 0, 1, 2, 0, 1, 4])
    (2, 3, 1, 7, 6, 4, 9, 8, 5)
    """
    validate_inversion_sequence(x)
    n = len(x)
    fen = _Fenwick(n)
    for v in range(1, n + 1):
        fen.add(v, 1)
    word = [0] * n
    remaining = n
    for t in range(n - 1, -1, -1):
        # (1+x_t)-th largest among remaining = (remaining - x_t)-th smallest
        v = fen.kth(remaining - x[t])
        word[t] = v
        fen.add(v, -1)
        remaining -= 1
    return tuple(word)


def inversion_count(perm: Sequence[int]) -> int:
    return sum(inversion_sequence(perm))


def permutation_graph_edges(perm: Sequence[int]) -> list[tuple[int, int]]:
    """All inversion pairs {a, b}, a < b, as edges on the vertex set 1..n.

    a < b are adjacent iff b appears before a in one-line notation.  The
    edge count equals the inversion number; intended for small-n
    validation, block statistics never need the explicit edge list.
    """
    validate_permutation(perm)
    n = len(perm)
    pos = [0] * (n + 1)
    for i, v in enumerate(perm):
        pos[v] = i
    return [
        (a, b)
        for a in range(1, n + 1)
        for b in range(a + 1, n + 1)
        if pos[a] > pos[b]
    ]


def decomposition_points(seq: Sequence[int]) -> list[int]:
    """Positions j in [len-1] at which the sequence decomposes.

    A nonnegative sequence a is decomposable at j when a_{j+i} <= i-1 for
    every i in [len-j]; for an inversion sequence these are exactly the
    block boundaries.  Single right-to-left pass: j qualifies iff
    j <= min_{s > j} (s - 1 - a_s).

    >>> decomposition_points([0, 0, 2, 0, 1, 2, 0, 1, 4])
    [3]
    """
    n = len(seq)
    if isinstance(seq, np.ndarray):
        if n <= 1:
            return []
        slack = np.arange(n, dtype=np.int64) - seq
        suffix = np.minimum.accumulate(slack[::-1])[::-1]
        hits = np.nonzero(np.arange(1, n) <= suffix[1:])[0] + 1
        return hits.tolist()
    points = [False] * n
    bound = n  # running min of s - 1 - a_s over the suffix
    for j in range(n - 1, 0, -1):
        bound = min(bound, j - seq[j])  # s = j+1 (1-based), s-1-a_s = j - a[j]
        points[j] = j <= bound
    return [j for j in range(1, n) if points[j]]


@dataclass(frozen=True)
class BlockDecomposition:
    """Cut points 0 = k_0 < k_1 < ... < k_l = n of the indecomposable blocks."""

    boundaries: tuple[int, ...]

    @property
    def sizes(self) -> tuple[int, ...]:
        return tuple(
            b - a for a, b in zip(self.boundaries, self.boundaries[1:])
        )

    @property
    def block_count(self) -> int:
        return len(self.boundaries) - 1

    def intervals(self) -> list[tuple[int, int]]:
        """Half-open 1-based value/position intervals (a+1 .. b) per block."""
        return [
            (a + 1, b) for a, b in zip(self.boundaries, self.boundaries[1:])
        ]


def blocks_from_inversion_sequence(x: Sequence[int]) -> BlockDecomposition:
    n = len(x)
    cuts = decomposition_points(x)
    return BlockDecomposition(tuple([0] + cuts + [n]))


def blocks(perm: Sequence[int]) -> BlockDecomposition:
    """Decomposition of a permutation into its indecomposable blocks.

    >>> blocks((2, 4, 1, 3, 5, 8, 6, 7)).sizes
    (4, 1, 3)
    """
    return blocks_from_inversion_sequence(inversion_sequence(perm))


def is_indecomposable(perm: Sequence[int]) -> bool:
    """True iff no proper prefix of the one-line word is {1..k}.

    Equivalent to connectivity of the permutation graph.
    """
    return not decomposition_points(inversion_sequence(perm))


def psi(perm: Sequence[int]) -> tuple[int, ...]:
    """Reverse the order of the indecomposable blocks; an involution.

    The inversion sequence of a permutation is the concatenation of the
    inversion sequences of its blocks, so reversing the segment order and
    rebuilding gives a permutation with the same inversion count and the
    block sizes in reverse order.
    """
    x = inversion_sequence(perm)
    cuts = blocks_from_inversion_sequence(x).boundaries
    segments = [x[a:b] for a, b in zip(cuts, cuts[1:])]
    rebuilt: list[int] = []
    for seg in reversed(segments):
        rebuilt.extend(seg)
    return permutation_from_inversion_sequence(rebuilt)


def parse_one_line(text: str) -> tuple[int, ...]:
    """Parse comma- or whitespace-separated one-line notation."""
    items = text.replace(",", " ").split()
    word = tuple(int(t) for t in items)
    validate_permutation(word)
    return word


def format_one_line(perm: Iterable[int]) -> str:
    return ",".join(str(v) for v in perm)
