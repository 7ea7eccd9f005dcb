from fractions import Fraction
from itertools import combinations
from math import comb, isqrt

import numpy as np
import pytest
from hypothesis import given, strategies as st

from conftest import tournaments
from tourney.core import InvalidParameter, gen_cyclic_blowup, gen_dk, gen_eps_random, gen_planted_long, gen_transitive
from tourney.ordering import analyze_ordering, local_search_ordering
from tourney.triads import (
    ALPHA_CAP,
    HypothesisViolated,
    as_fraction,
    count_directed_triangles,
    edge_triangle_count,
    edge_triangle_counts,
    extract_triangle_rich,
    measure_triangle_constant,
    triangle_rich_diagnostics,
)


def triples(T):
    A = T.adj
    return sum(1 for a, b, c in combinations(range(T.n), 3) if (A[a, b] and A[b, c] and A[c, a]) or (A[a, c] and A[c, b] and A[b, a]))


def score_formula(T):
    return comb(T.n, 3) - sum(comb(int(d), 2) for d in T.adj.sum(axis=1))


def test_count_examples():
    assert count_directed_triangles(gen_transitive(10)) == 0
    assert count_directed_triangles(gen_dk(1)) == 1
    assert count_directed_triangles(gen_dk(3)) == 27
    assert count_directed_triangles(gen_cyclic_blowup(18, 2)) == 54


@given(tournaments(max_n=12))
def test_count_matches_triples(T):
    assert count_directed_triangles(T) == triples(T) == score_formula(T)


@pytest.mark.parametrize("seed", range(5))
def test_count_random_n50(seed):
    T = gen_eps_random(50, 0.3, seed)
    assert count_directed_triangles(T) == triples(T)


def test_count_large_matches_score_formula():
    T = gen_eps_random(1500, 0.4, 1)
    assert count_directed_triangles(T) == score_formula(T)


@given(tournaments(max_n=10), st.data())
def test_relabel_invariance(T, data):
    perm = data.draw(st.permutations(range(T.n)))
    assert count_directed_triangles(T.relabel(perm)) == count_directed_triangles(T)


def test_edge_count_examples():
    C3 = gen_dk(1)
    a, b = next(iter(C3.edges()))
    assert edge_triangle_count(C3, a, b) == 1
    assert edge_triangle_count(gen_transitive(5), 0, 1) == 0
    T = gen_dk(3)
    for z in (6, 7, 8):
        for x in (0, 1, 2):
            assert edge_triangle_count(T, z, x) == 3
    with pytest.raises(InvalidParameter):
        edge_triangle_count(gen_transitive(5), 1, 0)


@given(tournaments(max_n=10))
def test_edge_counts_sum_and_recount(T):
    C = edge_triangle_counts(T)
    assert C.sum() == 3 * count_directed_triangles(T)
    for u, v in T.edges():
        want = sum(1 for x in range(T.n) if T.adj[v, x] and T.adj[x, u])
        assert C[u, v] == edge_triangle_count(T, u, v) == want


def test_measure_constant():
    for n, k in ((9, 1), (18, 2), (36, 4)):
        assert measure_triangle_constant(gen_cyclic_blowup(n, k), Fraction(1, 9 * k)) == 3
    for m in range(1, 5):
        assert measure_triangle_constant(gen_dk(m), "1/9") == 3
    with pytest.raises(InvalidParameter):
        measure_triangle_constant(gen_dk(1), 0)


def test_as_fraction():
    assert as_fraction("3/20") == Fraction(3, 20)
    assert as_fraction(0.15) == Fraction(3, 20)
    assert as_fraction(2) == 2


def test_eps_random_expectation():
    eps, n = 0.1, 1000
    mean = np.mean([count_directed_triangles(gen_eps_random(n, eps, s)) for s in range(30)])
    want = comb(n, 3) * eps * (1 - eps)
    assert abs(mean - want) <= 0.1 * want


def check_rich(T, an, rich):
    B = an.num_backward
    long_pairs = set(an.vertex_edges(an.long_mask))
    assert set(rich.edges) <= long_pairs
    din = np.bincount(an.bi, minlength=T.n)
    dout = np.bincount(an.bj, minlength=T.n)
    for (i, j), (t, h) in zip(rich.positions, rich.edges):
        assert an.order[j] == t and an.order[i] == h
        assert din[i] ** 2 <= 16 * B or dout[j] ** 2 <= 16 * B
        assert rich.per_edge_count[(t, h)] == sum(1 for x in range(T.n) if T.adj[h, x] and T.adj[x, t])
    # |S-|, |S+| <= alpha^{1/2} n / 4 = sqrt(B)/4
    assert 16 * len(rich.s_minus) ** 2 <= B and 16 * len(rich.s_plus) ** 2 <= B or B == 0


@pytest.mark.parametrize("seed", range(3))
def test_extract_planted(seed):
    T = gen_planted_long(2048, 60, 128, seed)
    an = analyze_ordering(T, local_search_ordering(T, 0))
    assert an.alpha <= ALPHA_CAP and 4 * an.num_long >= an.num_backward
    rich = extract_triangle_rich(T, an)
    assert 2 * len(rich.edges) >= an.num_long
    assert rich.min_count >= 2048 // 64
    check_rich(T, an, rich)


def test_extract_single_edge():
    T = gen_planted_long(512, 1, 200, 4)
    an = analyze_ordering(T, local_search_ordering(T, 0))
    rich = extract_triangle_rich(T, an)
    assert an.num_backward == an.num_long == len(rich.edges) == 1


def test_extract_guards():
    T = gen_dk(4)
    an = analyze_ordering(T, list(range(12)))
    with pytest.raises(HypothesisViolated, match="exceeds"):
        extract_triangle_rich(T, an)
    diag = triangle_rich_diagnostics(T, an)
    assert len(diag.per_edge_count) == len(diag.edges)


def test_threshold_square():
    T = gen_eps_random(100, 0.05, 2)
    an = analyze_ordering(T, local_search_ordering(T))
    d = triangle_rich_diagnostics(T, an)
    assert d.threshold_sq == 16 * an.num_backward
    assert isqrt(d.threshold_sq) <= d.threshold < isqrt(d.threshold_sq) + 1
