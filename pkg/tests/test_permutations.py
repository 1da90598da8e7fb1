import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from invperm.permutations import (
    blocks,
    blocks_from_inversion_sequence,
    decomposition_points,
    inversion_count,
    inversion_sequence,
    is_indecomposable,
    permutation_from_inversion_sequence,
    permutation_graph_edges,
    psi,
    validate_inversion_sequence,
)

PAPER_PERM = (2, 3, 1, 7, 6, 4, 9, 8, 5)
PAPER_SEQ = [0, 0, 2, 0, 1, 2, 0, 1, 4]
BLOCK_PERM = (2, 4, 1, 3, 5, 8, 6, 7)


def inversion_sequence_quadratic(perm):
    """O(n^2) definitional oracle."""
    return [
        sum(1 for j in range(i) if perm[j] > perm[i]) for i in range(len(perm))
    ]


def decomposition_points_brute(perm):
    """All k with sigma({1..k}) = {1..k}, straight from the definition."""
    n = len(perm)
    return [
        k for k in range(1, n) if set(perm[:k]) == set(range(1, k + 1))
    ]


class UnionFind:
    def __init__(self, n):
        self.parent = list(range(n + 1))

    def find(self, a):
        while self.parent[a] != a:
            self.parent[a] = self.parent[self.parent[a]]
            a = self.parent[a]
        return a

    def union(self, a, b):
        self.parent[self.find(a)] = self.find(b)


def graph_components(perm):
    """Vertex sets of the permutation graph components via union-find."""
    n = len(perm)
    uf = UnionFind(n)
    for a, b in permutation_graph_edges(perm):
        uf.union(a, b)
    comps = {}
    for v in range(1, n + 1):
        comps.setdefault(uf.find(v), set()).add(v)
    return sorted(comps.values(), key=min)


def random_inversion_sequence(rng, n):
    return [int(rng.integers(0, i + 1)) for i in range(n)]


def test_paper_example_both_directions():
    assert inversion_sequence(PAPER_PERM) == PAPER_SEQ
    assert permutation_from_inversion_sequence(PAPER_SEQ) == PAPER_PERM


def test_identity_and_reversal():
    n = 9
    identity = tuple(range(1, n + 1))
    reversal = tuple(range(n, 0, -1))
    assert inversion_sequence(identity) == [0] * n
    assert inversion_sequence(reversal) == list(range(n))
    assert permutation_from_inversion_sequence([0] * 5) == (1, 2, 3, 4, 5)


@pytest.mark.parametrize("n", range(1, 8))
def test_round_trip_exhaustive(n):
    for word in itertools.permutations(range(1, n + 1)):
        x = inversion_sequence(word)
        assert x == inversion_sequence_quadratic(word)
        assert permutation_from_inversion_sequence(x) == word


def test_round_trip_large_random():
    rng = np.random.default_rng(42)
    for n in (10, 137, 1000):
        x = random_inversion_sequence(rng, n)
        perm = permutation_from_inversion_sequence(x)
        assert inversion_sequence(perm) == x
        word = list(range(1, n + 1))
        rng.shuffle(word)
        assert permutation_from_inversion_sequence(
            inversion_sequence(tuple(word))
        ) == tuple(word)


@given(st.integers(0, 10**6), st.integers(1, 300))
@settings(max_examples=25, deadline=None)
def test_round_trip_property(seed, n):
    rng = np.random.default_rng(seed)
    x = random_inversion_sequence(rng, n)
    assert inversion_sequence(permutation_from_inversion_sequence(x)) == x


def test_validation_errors():
    with pytest.raises(ValueError):
        inversion_sequence((1, 1, 2))
    with pytest.raises(ValueError):
        permutation_from_inversion_sequence([0, 2])
    with pytest.raises(ValueError):
        validate_inversion_sequence([1])


def test_graph_edges_block_example():
    edges = set(permutation_graph_edges(BLOCK_PERM))
    assert {e for e in edges if max(e) <= 4} == {(1, 2), (1, 4), (3, 4)}
    assert len(edges) == inversion_count(BLOCK_PERM)


def test_graph_edges_extremes():
    assert permutation_graph_edges((1, 2, 3, 4)) == []
    n = 6
    assert len(permutation_graph_edges(tuple(range(n, 0, -1)))) == n * (n - 1) // 2


def test_decomposition_points_examples():
    assert decomposition_points(PAPER_SEQ) == [3]
    assert decomposition_points([0, 0, 0, 0]) == [1, 2, 3]
    x = inversion_sequence(BLOCK_PERM)
    assert decomposition_points(x) == [4, 5]
    assert decomposition_points_brute(BLOCK_PERM) == [4, 5]
    assert decomposition_points([0]) == []


@pytest.mark.parametrize("n", range(1, 8))
def test_decomposition_points_match_prefix_definition(n):
    for word in itertools.permutations(range(1, n + 1)):
        x = inversion_sequence(word)
        assert decomposition_points(x) == decomposition_points_brute(word)


@given(st.integers(0, 10**6), st.integers(1, 200))
@settings(max_examples=25, deadline=None)
def test_decomposition_points_numpy_path_agrees(seed, n):
    rng = np.random.default_rng(seed)
    # arbitrary nonnegative sequences, not just inversion sequences
    seq = rng.integers(0, 8, size=n)
    assert decomposition_points(seq) == decomposition_points(seq.tolist())


def test_blocks_examples():
    decomposition = blocks(BLOCK_PERM)
    assert decomposition.boundaries == (0, 4, 5, 8)
    assert decomposition.sizes == (4, 1, 3)
    assert decomposition.block_count == 3
    assert blocks((1, 2, 3, 4, 5)).sizes == (1, 1, 1, 1, 1)
    assert blocks((5, 4, 3, 2, 1)).sizes == (5,)


def test_is_indecomposable_examples():
    assert is_indecomposable((2, 4, 1, 3))
    assert not is_indecomposable(BLOCK_PERM)
    assert is_indecomposable((1,))


@pytest.mark.parametrize("n", range(1, 8))
def test_connectivity_matches_indecomposability(n):
    for word in itertools.permutations(range(1, n + 1)):
        comps = graph_components(word)
        assert is_indecomposable(word) == (len(comps) == 1)
        # components are consecutive intervals equal to the blocks
        intervals = blocks(word).intervals()
        assert [set(range(a, b + 1)) for a, b in intervals] == comps
        assert len(decomposition_points(inversion_sequence(word))) + 1 == len(comps)


def test_psi_paper_block_example():
    image = psi(BLOCK_PERM)
    assert inversion_sequence(image) == [0, 1, 1, 0, 0, 0, 2, 1]
    assert blocks(image).sizes == (3, 1, 4)
    assert psi(image) == BLOCK_PERM


def test_psi_identity_fixed():
    identity = tuple(range(1, 8))
    assert psi(identity) == identity


@given(st.integers(0, 10**6), st.integers(1, 200))
@settings(max_examples=30, deadline=None)
def test_psi_involution_and_invariants(seed, n):
    rng = np.random.default_rng(seed)
    perm = permutation_from_inversion_sequence(random_inversion_sequence(rng, n))
    image = psi(perm)
    assert psi(image) == perm
    assert inversion_count(image) == inversion_count(perm)
    assert blocks(image).sizes == tuple(reversed(blocks(perm).sizes))
