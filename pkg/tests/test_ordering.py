from fractions import Fraction
from itertools import permutations

import numpy as np
import pytest
from hypothesis import given, strategies as st

from conftest import tournaments
from tourney.core import SizeLimitError, gen_cyclic_blowup, gen_dk, gen_transitive, random_tournament
from tourney.ordering import (
    analyze_ordering,
    backward_count,
    check_prop21,
    exact_min_backward,
    local_search_ordering,
    long_or_boost,
    window_counts,
)


def backward_by_pairs(T, order):
    return sum(1 for a in range(T.n) for b in range(a + 1, T.n) if T.adj[order[b], order[a]])


def min_backward_by_permutations(T):
    return min(backward_by_pairs(T, p) for p in permutations(range(T.n)))


def relocation_improves(T, order):
    base = backward_by_pairs(T, order)
    for p in range(T.n):
        rest = order[:p] + order[p + 1 :]
        for q in range(T.n):
            if backward_by_pairs(T, rest[:q] + [order[p]] + rest[q:]) < base:
                return True
    return False


def test_exact_examples():
    assert exact_min_backward(gen_transitive(8))[1] == 0
    assert exact_min_backward(gen_dk(1))[1] == 1
    assert Fraction(exact_min_backward(gen_dk(1))[1], 9) == Fraction(1, 9)
    assert exact_min_backward(gen_dk(2))[1] == 4
    with pytest.raises(SizeLimitError):
        exact_min_backward(gen_transitive(23))


@given(tournaments(max_n=7))
def test_exact_matches_permutations(T):
    order, best = exact_min_backward(T)
    assert best == min_backward_by_permutations(T)
    assert backward_by_pairs(T, order) == best
    assert check_prop21(T, order) == []


@given(tournaments(max_n=9), st.integers(0, 2**32))
def test_local_search_is_relocation_stable(T, seed):
    order = local_search_ordering(T, seed)
    assert sorted(order) == list(range(T.n))
    assert not relocation_improves(T, order)
    assert check_prop21(T, order) == []
    assert backward_count(T, order) >= exact_min_backward(T)[1]


def test_local_search_examples():
    order = local_search_ordering(gen_transitive(50))
    assert backward_count(gen_transitive(50), order) == 0
    assert backward_count(gen_dk(1), local_search_ordering(gen_dk(1))) == 1
    for s in range(200):
        T = random_tournament(3 + s % 8, s)
        order = local_search_ordering(T, s)
        assert backward_count(T, order) >= exact_min_backward(T)[1]
        assert check_prop21(T, order) == []


def test_local_search_deterministic():
    T = random_tournament(200, 4)
    assert local_search_ordering(T, 7) == local_search_ordering(T, 7)


def test_analysis_examples():
    an = analyze_ordering(gen_transitive(10), list(range(10)))
    assert an.num_backward == 0 and an.alpha == 0
    T = gen_dk(4)
    an = analyze_ordering(T, list(range(12)))
    assert an.num_backward == 16
    assert min(an.lengths) >= 5
    assert an.num_long == 16
    an = analyze_ordering(gen_dk(1), [0, 1, 2])
    assert an.backward == [(0, 2, 2)]
    assert an.vertex_edges() == [(2, 0)]


@given(tournaments(max_n=12), st.data())
def test_analysis_matches_pairs(T, data):
    order = data.draw(st.permutations(range(T.n)))
    an = analyze_ordering(T, order)
    pairs = [(a, b) for a in range(T.n) for b in range(a + 1, T.n) if T.adj[order[b], order[a]]]
    assert sorted(zip(an.bi.tolist(), an.bj.tolist())) == pairs
    thr = -(-T.n // 16)
    assert an.num_long == sum(1 for a, b in pairs if b - a >= thr)


def test_prop21_reversed_transitive():
    assert check_prop21(gen_transitive(6), list(range(5, -1, -1)))


@given(tournaments(max_n=10), st.data())
def test_prop21_against_definition(T, data):
    order = data.draw(st.permutations(range(T.n)))
    found = {(v.kind, v.i, v.j) for v in check_prop21(T, order)}
    want = set()
    for i in range(T.n):
        for j in range(i + 1, T.n):
            out = sum(T.adj[order[i], order[x]] for x in range(i + 1, j + 1))
            inn = sum(T.adj[order[x], order[j]] for x in range(i, j))
            if 2 * out < j - i:
                want.add(("out", i, j))
            if 2 * inn < j - i:
                want.add(("in", i, j))
    assert found == want


@given(tournaments(min_n=2, max_n=20), st.data())
def test_window_counts_brute(T, data):
    order = data.draw(st.permutations(range(T.n)))
    w = data.draw(st.integers(1, T.n))
    an = analyze_ordering(T, order)
    got = window_counts(an, w).tolist()
    want = [
        sum(1 for a in range(s, s + w) for b in range(a + 1, s + w) if T.adj[order[b], order[a]])
        for s in range(T.n - w + 1)
    ]
    assert got == want


def test_dichotomy_examples():
    T = gen_dk(4)
    order = list(range(12))
    res = long_or_boost(T, analyze_ordering(T, order), Fraction(1, 9))
    assert res.is_long and res.num_long == 16 == res.num_backward

    T = gen_cyclic_blowup(48, 2)
    order = list(range(48))
    eps = Fraction(1, 18)
    res = long_or_boost(T, analyze_ordering(T, order), eps)
    assert res.variant in ("long-edges", "dense-window")
    if res.is_window:
        cnt = backward_by_pairs(T.subtournament([order[p] for p in res.window_positions()]), list(range(res.width)))
        assert cnt >= 2 * eps * res.width**2

    T = gen_transitive(40)
    res = long_or_boost(T, analyze_ordering(T, list(range(40))), Fraction(1, 100))
    assert res.variant == "no-certificate"


def test_dense_window_found():
    # transitive except a random 16-block: every backward edge is shorter than n/16
    n = 256
    A = np.triu(np.ones((n, n), dtype=bool), 1)
    A[100:116, 100:116] = random_tournament(16, 3).adj
    from tourney.core import Tournament

    T = Tournament(A)
    an = analyze_ordering(T, list(range(n)))
    assert an.num_long == 0 and an.num_backward > 0
    res = long_or_boost(T, an, an.alpha)
    assert res.is_window and res.width == n // 8
    assert res.backward_count == an.num_backward
    assert res.backward_count >= 2 * an.alpha * res.width**2


@given(tournaments(min_n=16, max_n=40), st.data())
def test_dichotomy_certificates_recount(T, data):
    order = data.draw(st.permutations(range(T.n)))
    an = analyze_ordering(T, order)
    if an.num_backward == 0:
        return
    eps = an.alpha / data.draw(st.integers(1, 8))
    res = long_or_boost(T, an, eps)
    if res.is_long:
        assert 4 * an.num_long >= an.num_backward
    elif res.is_window:
        pos = [order[p] for p in res.window_positions()]
        cnt = backward_by_pairs(T.subtournament(pos), list(range(res.width)))
        assert res.width >= T.n // 8 and cnt >= 2 * eps * res.width**2


def test_small_n_no_certificate():
    T = gen_dk(3)  # n = 9 < 16
    an = analyze_ordering(T, [0, 3, 6, 1, 4, 7, 2, 5, 8])
    res = long_or_boost(T, an, an.alpha)
    assert res.variant in ("long-edges", "no-certificate")
