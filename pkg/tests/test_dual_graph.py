import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import brute_dual_edges, diameter_oracle, normalized_gap_oracle
from tetgluing.dual_graph import (
    MultiGraph,
    build_dual,
    diameter,
    double_graph,
    is_connected,
    is_simple,
    spectral_gap,
)
from tetgluing.errors import DisconnectedGraph
from tetgluing.model import GluingInstance, sample_simple, sample_uniform


@settings(max_examples=30, deadline=None)
@given(n=st.integers(1, 60), seed=st.integers(0, 2**32))
def test_dual_is_four_regular_and_matches_oracle(n, seed):
    g = sample_uniform(n, seed)
    d = build_dual(g)
    assert d.num_edges == 2 * n
    assert np.all(np.bincount(d.edges.ravel(), minlength=n) == 4)
    assert sorted(map(tuple, d.edges.tolist())) == brute_dual_edges(g.partner)
    edges = brute_dual_edges(g.partner)
    simple = all(a != b for a, b in edges) and len(set(edges)) == len(edges)
    assert is_simple(d) == simple


@settings(max_examples=30, deadline=None)
@given(n=st.integers(1, 70), seed=st.integers(0, 2**32))
def test_diameter_methods_match_oracle(n, seed):
    g = sample_uniform(n, seed)
    d = build_dual(g)
    expected = diameter_oracle(n, brute_dual_edges(g.partner))
    assert diameter(d) == expected
    assert diameter(d, "bfs") == expected
    assert is_connected(d) == (expected != math.inf)


def test_diameter_across_word_boundary():
    # more than 64 vertices exercises several bitset sweeps
    for seed in range(3):
        g = sample_simple(150, seed)
        d = build_dual(g)
        assert diameter(d) == diameter(d, "bfs") == diameter_oracle(150, brute_dual_edges(g.partner))


def test_diameter_unknown_method():
    with pytest.raises(ValueError):
        diameter(build_dual(sample_uniform(3, 0)), "magic")


def test_disconnected_dual():
    # two tetrahedra each glued to itself
    g = GluingInstance.from_pairs(
        2,
        [((0, 0), (0, 1), 0), ((0, 2), (0, 3), 0), ((1, 0), (1, 1), 1), ((1, 2), (1, 3), 2)],
    )
    d = build_dual(g)
    assert not is_connected(d)
    assert diameter(d) == math.inf
    with pytest.raises(DisconnectedGraph):
        spectral_gap(d)


@settings(max_examples=15, deadline=None)
@given(n=st.integers(2, 80), seed=st.integers(0, 2**32))
def test_dense_gap_matches_oracle(n, seed):
    g = sample_uniform(n, seed)
    d = build_dual(g)
    if not is_connected(d):
        return
    rep = spectral_gap(d)
    assert rep.method == "dense"
    assert rep.lambda1 == pytest.approx(normalized_gap_oracle(n, d.edges.tolist(), 4), abs=1e-10)


def test_lanczos_matches_dense():
    g = build_dual(sample_simple(2500, 1))
    lz = spectral_gap(g, tol=1e-10)
    assert lz.method == "lanczos" and lz.iterations > 0
    dense = spectral_gap(g, dense_limit=10_000)
    assert dense.method == "dense"
    assert lz.lambda1 == pytest.approx(dense.lambda1, abs=1e-7)


def test_double_graph_halves_the_gap():
    g = build_dual(sample_simple(300, 4))
    dg = double_graph(g)
    assert dg.degree == 8 and dg.n == 600
    assert spectral_gap(dg).lambda1 == pytest.approx(spectral_gap(g).lambda1 / 2, abs=1e-10)
    assert diameter(dg) == diameter(g) + 1


def test_loops_count_twice():
    g = MultiGraph(1, [[0, 0], [0, 0]], 4)
    assert g.adjacency().toarray().tolist() == [[4.0]]
    with pytest.raises(ValueError):
        MultiGraph(2, [[0, 1]], 4)


def test_gap_needs_two_vertices():
    with pytest.raises(ValueError):
        spectral_gap(MultiGraph(1, [[0, 0], [0, 0]], 4))


def test_random_dual_is_expander_at_moderate_n():
    lams = [spectral_gap(build_dual(sample_simple(1000, s))).lambda1 for s in range(5)]
    # 4-regular Ramanujan bound is 1 - sqrt(3)/2 ~ 0.134
    assert min(lams) > 0.05
    assert max(lams) < 1 - math.sqrt(3) / 2 + 0.01
