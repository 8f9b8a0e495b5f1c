import itertools
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lowsum.embedders import EmbedResult, GreedyConfig, greedy_embed
from lowsum.errors import BadParameters, BadValue, PreconditionViolated, TraceMismatch
from lowsum.graphs import gen_forest, gen_zero_sum_labeling
from lowsum.theory import (
    VertexSubgraph,
    analyze_trace,
    balanced_window,
    build_positive_graph,
    check_averaging_gap,
    find_balanced_vertex,
)


def test_averaging_gap_examples():
    flat = check_averaging_gap([1] * 5, 2)
    assert flat.gap == 0 and flat.bound == Fraction(4, 5) and flat.holds
    tight = check_averaging_gap((1, 1, 1, 1, -1, -1), 2)
    assert tight.gap == tight.bound == Fraction(2, 3)


def test_averaging_gap_errors():
    with pytest.raises(BadParameters):
        check_averaging_gap((1, -1), 2)
    with pytest.raises(BadParameters):
        check_averaging_gap((1, -1), 0)
    with pytest.raises(BadValue):
        check_averaging_gap((1, 0, -1), 1)
    with pytest.raises(BadValue):
        check_averaging_gap((1, 1.5, -1), 1)


def test_averaging_gap_exhaustive_small():
    for p in range(2, 9):
        for x in itertools.product((1, -1), repeat=p):
            for q in range(1, p):
                assert check_averaging_gap(x, q).holds


@settings(max_examples=100, deadline=None)
@given(x=st.lists(st.sampled_from([1, -1]), min_size=2, max_size=500), data=st.data())
def test_averaging_gap_random(x, data):
    q = data.draw(st.integers(1, len(x) - 1))
    assert check_averaging_gap(x, q).holds


def test_positive_graph_examples():
    lab = gen_zero_sum_labeling(9, 4)
    G = build_positive_graph(lab)
    assert G.m == 9 * 8 // 4
    for v in G.vertices:
        assert G.degree(v) == sum(1 for u in range(1, 10) if u != v and lab.label(u, v) == 1)
    pair = build_positive_graph(lab, excluded=range(3, 10))
    assert pair.vertices == (1, 2)
    assert pair.m == (1 if lab.label(1, 2) == 1 else 0)


def test_vertex_subgraph_rejects_foreign_edge():
    with pytest.raises(BadParameters):
        VertexSubgraph([1, 2], [(1, 3)])


@settings(max_examples=40, deadline=None)
@given(n=st.sampled_from([8, 9, 12, 13, 16, 17, 24, 25]), seed=st.integers(0, 10**6), data=st.data())
def test_positive_graph_size_chain(n, seed, data):
    lab = gen_zero_sum_labeling(n, seed, data.draw(st.sampled_from(["uniform", "block_adversarial"])))
    k = data.draw(st.integers(0, n - 2))
    excluded = data.draw(st.permutations(range(1, n + 1)))[:k]
    G = build_positive_graph(lab, excluded)
    half_full = Fraction(math.comb(n, 2), 2)
    half_rest = Fraction(math.comb(n - k, 2), 2)
    assert abs(G.m - half_rest) <= k * n + abs(half_full - half_rest)


def test_balanced_window():
    assert balanced_window(100, Fraction(1, 10)) == (15, 84)
    lo, hi = balanced_window(40, Fraction(1, 4))
    assert lo == 0 and hi == 39


def test_find_balanced_vertex_random():
    lab = gen_zero_sum_labeling(100, 11)
    G = build_positive_graph(lab)
    v = find_balanced_vertex(G, Fraction(1, 10))
    assert 15 <= G.degree(v) <= 84
    assert all(not 15 <= G.degree(u) <= 84 for u in G.vertices if u < v)


def test_large_epsilon_accepts_every_vertex():
    lab = gen_zero_sum_labeling(40, 2, "block_adversarial")
    assert find_balanced_vertex(build_positive_graph(lab), Fraction(1, 4)) == 1


def test_balanced_vertex_preconditions():
    lab = gen_zero_sum_labeling(100, 3)
    with pytest.raises(PreconditionViolated):
        find_balanced_vertex(build_positive_graph(lab), Fraction(1, 20))
    # epsilon * n is fine here but the complete graph is far too dense
    n = 60
    dense = VertexSubgraph(range(1, n + 1), itertools.combinations(range(1, n + 1), 2))
    with pytest.raises(PreconditionViolated):
        find_balanced_vertex(dense, Fraction(1, 5))


def test_analyze_trace_vacuous_small(L4, P3):
    config = GreedyConfig(Fraction(1, 5))
    result = greedy_embed(L4, P3, config)
    report = analyze_trace(result, P3, config)
    assert not report.flagged
    assert report.step_bound == (1 + Fraction(16, 15)) * 2 + 44
    assert report.value_bound == config.theorem_bound(2)
    assert report.max_step_delta == 0
    assert "320" in report.note


@settings(max_examples=20, deadline=None)
@given(n=st.sampled_from([16, 17, 32, 33]), seed=st.integers(0, 10**6), kind=st.sampled_from(["path", "star", "random_tree"]))
def test_analyze_trace_definitions(n, seed, kind):
    lab, forest = gen_zero_sum_labeling(n, seed), gen_forest(n, kind, seed)
    config = GreedyConfig(Fraction(1, 5))
    result = greedy_embed(lab, forest, config)
    report = analyze_trace(result, forest, config)
    deltas = [b - a for a, b in zip(result.trace, result.trace[1:])]
    assert report.max_step_delta == max(abs(d) for d in deltas)
    assert report.step_flags == tuple(abs(d) > report.step_bound for d in deltas)
    assert report.to_dict()["flagged_steps"] == [k for k, f in enumerate(report.step_flags) if f]


def test_analyze_trace_mismatch(L4, P3):
    config = GreedyConfig(Fraction(1, 5))
    result = greedy_embed(L4, P3, config)
    short = EmbedResult(result.embedding, result.c_value, result.trace[:-1], {}, "greedy", result.ordering)
    with pytest.raises(TraceMismatch):
        analyze_trace(short, P3, config)


def test_balanced_vertex_hub_graph():
    # a block of hubs adjacent to everything, topped up to half density
    n = 100
    hubs = range(1, 30)
    edges = {(min(u, v), max(u, v)) for u in hubs for v in range(1, n + 1) if u != v}
    rest = list(range(30, n + 1))
    need = n * (n - 1) // 4 - len(edges)
    extra = [e for e in itertools.combinations(rest, 2)][: max(need, 0)]
    G = VertexSubgraph(range(1, n + 1), edges | set(extra))
    v = find_balanced_vertex(G, Fraction(1, 10))
    lo, hi = balanced_window(n, Fraction(1, 10))
    assert lo <= G.degree(v) <= hi
    degrees = np.array([G.degree(u) for u in G.vertices])
    assert degrees.min() < lo or degrees.max() > hi
