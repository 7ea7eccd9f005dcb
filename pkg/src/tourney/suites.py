"""Verification suites: each instance yields records carrying both sides of a checked inequality."""

from fractions import Fraction
from itertools import combinations

import numpy as np

from . import rng
from .core import Tournament, random_tournament, gen_cyclic_blowup, gen_dk, gen_eps_random, gen_planted_long
from .embed import trace_violations
from .ordering import EXACT_MAX_N, analyze_ordering, check_prop21, exact_min_backward, local_search_ordering, long_or_boost
from .triads import ALPHA_CAP, HypothesisViolated, count_directed_triangles, extract_triangle_rich

SUITES = ("prop21", "lemma22", "lemma31", "thm21", "embedding")


def record(suite, instance, check, lhs, rhs, ok, **extra):
    def plain(x):
        return str(x) if isinstance(x, Fraction) else x

    return {"suite": suite, "instance": instance, "check": check, "lhs": plain(lhs), "rhs": plain(rhs), "pass": bool(ok), **extra}


def all_tournaments(n):
    """Every labelled tournament on n vertices (2^(n choose 2) of them)."""
    pairs = list(combinations(range(n), 2))
    for mask in range(1 << len(pairs)):
        A = np.zeros((n, n), dtype=bool)
        for b, (u, v) in enumerate(pairs):
            if mask >> b & 1:
                A[v, u] = True
            else:
                A[u, v] = True
        yield Tournament(A, validate=False)


# ---------------------------------------------------------------- prop21


def prop21_records(T, name, seed=0):
    out = []
    if T.n <= EXACT_MAX_N:
        order, best = exact_min_backward(T)
        bad = check_prop21(T, order)
        out.append(record("prop21", name, "violations(exact order) == 0", len(bad), 0, not bad))
        local = analyze_ordering(T, local_search_ordering(T, seed)).num_backward
        out.append(record("prop21", name, "exact backward <= local backward", best, local, best <= local))
    bad = check_prop21(T, local_search_ordering(T, seed))
    out.append(record("prop21", name, "violations(local order) == 0", len(bad), 0, not bad))
    return out


def suite_prop21(max_n=5, T=None, name=None):
    if T is not None:
        return prop21_records(T, name or "input")
    out = []
    for n in range(1, max_n + 1):
        for idx, T in enumerate(all_tournaments(n)):
            out.extend(prop21_records(T, f"n={n}#{idx}"))
    return out


# ---------------------------------------------------------------- lemma22


def recount_window(T, order, start, width):
    pos = order[start : start + width]
    return sum(1 for a in range(width) for b in range(a + 1, width) if T.adj[pos[b], pos[a]])


def recount_long(T, order, length):
    n = T.n
    return sum(1 for a in range(n) for b in range(a + length, n) if T.adj[order[b], order[a]])


def lemma22_records(T, eps, name, seed=0):
    order = local_search_ordering(T, seed)
    an = analyze_ordering(T, order)
    res = long_or_boost(T, an, eps)
    if res.is_long:
        B = sum(1 for a in range(T.n) for b in range(a + 1, T.n) if T.adj[order[b], order[a]])
        L = recount_long(T, order, an.long_threshold)
        return [record("lemma22", name, "long-edges: 4|B'| >= |B|", 4 * L, B, 4 * L >= B, variant=res.variant)]
    if res.is_window:
        cnt = recount_window(T, order, res.start, res.width)
        need = 2 * Fraction(eps) * res.width**2
        return [
            record("lemma22", name, "dense-window: width >= floor(n/8)", res.width, T.n // 8, res.width >= T.n // 8, variant=res.variant),
            record("lemma22", name, "dense-window: backward inside >= 2 eps width^2", cnt, need, cnt >= need, variant=res.variant),
        ]
    return [record("lemma22", name, "no certificate returned", res.reason, None, True, variant=res.variant)]


def local_noise(n, block, blocks, start, seed=0):
    """Transitive on n vertices except ``blocks`` consecutive random blocks of ``block`` vertices from ``start``.

    Every backward edge is shorter than ``block``, so with block <= n/16 the
    long-edge count is zero and only a dense window can certify.
    """
    A = np.triu(np.ones((n, n), dtype=bool), 1)
    for b in range(blocks):
        lo = start + b * block
        R = random_tournament(block, rng.derive(seed, "noise", b)).adj
        A[lo : lo + block, lo : lo + block] = R
    return Tournament(A)


def lemma22_instances(seeds=20):
    """(name, tournament) pairs drawn from every non-transitive generator family."""
    for s in range(seeds):
        k = 2 + s % 5
        yield f"dk(k={k})", gen_dk(k)
        n, kb = [(48, 2), (36, 3), (60, 4), (96, 2)][s % 4]
        yield f"cyclic-blowup(n={n},k={kb},seed={s})", gen_cyclic_blowup(n, kb, s)
        yield f"eps-random(n=200,eps=0.1,seed={s})", gen_eps_random(200, 0.1, s)
        yield f"eps-random(n=128,eps=0.02,seed={s})", gen_eps_random(128, 0.02, s)
        yield f"planted-long(n=256,m=40,len=24,seed={s})", gen_planted_long(256, 40, 24, s)
        start = (37 * s) % 200
        yield f"local-noise(n=256,block=16,blocks=2,start={start},seed={s})", local_noise(256, 16, 2, start, s)


def suite_lemma22(seeds=20, T=None, eps=None, name=None):
    """Instances are checked at eps = alpha, alpha/2 and alpha/4 so both certificate kinds occur."""
    if T is not None:
        return lemma22_records(T, eps, name or "input")
    out = []
    for name, T in lemma22_instances(seeds):
        alpha = analyze_ordering(T, local_search_ordering(T, 0)).alpha
        if alpha == 0:
            continue
        for f in (1, 2, 4):
            out.extend(lemma22_records(T, alpha / f, f"{name},eps=alpha/{f}"))
    return out


# ---------------------------------------------------------------- lemma31


def recount_triangles_on(T, u, v):
    """Directed triangles through u->v, by scanning every third vertex."""
    return sum(1 for x in range(T.n) if T.adj[v, x] and T.adj[x, u])


def lemma31_records(T, name, seed=0):
    an = analyze_ordering(T, local_search_ordering(T, seed))
    try:
        rich = extract_triangle_rich(T, an)
    except HypothesisViolated as exc:
        return [record("lemma31", name, "preconditions", str(exc), None, False)]
    need = T.n // 64
    low = min((recount_triangles_on(T, u, v) for u, v in rich.edges), default=None)
    return [
        record("lemma31", name, "2|B''| >= |B'|", 2 * len(rich.edges), an.num_long, 2 * len(rich.edges) >= an.num_long),
        record("lemma31", name, "min triangles on B'' >= floor(n/64)", low, need, low is not None and low >= need),
    ]


def planted_instance(n, m, min_length, seed, max_tries=20):
    """Planted instance whose local-search order meets the alpha and long-edge hypotheses.

    Seeds failing them are replaced by derived seeds; returns (T, seed used, tries).
    """
    s = seed
    for tries in range(1, max_tries + 1):
        T = gen_planted_long(n, m, min_length, s)
        an = analyze_ordering(T, local_search_ordering(T, 0))
        if 0 < an.alpha <= ALPHA_CAP and 4 * an.num_long >= an.num_backward:
            return T, s, tries
        s = rng.derive(seed, "regen", tries)
    raise RuntimeError(f"no planted instance met the hypotheses after {max_tries} tries")


def suite_lemma31(seeds=3, n=2048, m=60, min_length=128, T=None, name=None):
    if T is not None:
        return lemma31_records(T, name or "input")
    out = []
    for s in range(seeds):
        T, used, _ = planted_instance(n, m, min_length, s)
        out.extend(lemma31_records(T, f"planted-long(n={n},m={m},len={min_length},seed={used})"))
    return out


# ---------------------------------------------------------------- thm21

BLOWUPS = ((9, 1), (18, 1), (18, 2), (36, 4))


def thm21_records(n, k):
    T = gen_cyclic_blowup(n, k)
    name = f"cyclic-blowup(n={n},k={k})"
    b = n // (3 * k)
    tri = count_directed_triangles(T)
    out = [record("thm21", name, "triangles == k(n/3k)^3", tri, k * b**3, tri == k * b**3)]
    if n <= EXACT_MAX_N:
        _, fas = exact_min_backward(T)
        out.append(record("thm21", name, "min backward == k(n/3k)^2", fas, k * b * b, fas == k * b * b))
    c_prime = Fraction(tri) / (Fraction(1, 9 * k) ** 2 * n**3)
    out.append(record("thm21", name, "triangles/(eps^2 n^3) == 3 at eps=1/9k", c_prime, 3, c_prime == 3))
    return out


def suite_thm21(T=None, eps=None, c=1.0, name=None):
    if T is not None:
        eps = Fraction(eps)
        tri = count_directed_triangles(T)
        lhs = Fraction(tri)
        rhs = Fraction(c) * eps * eps * T.n**3
        return [record("thm21", name or "input", "triangles >= c eps^2 n^3", lhs, rhs, lhs >= rhs)]
    out = []
    for n, k in BLOWUPS:
        out.extend(thm21_records(n, k))
    return out


# ---------------------------------------------------------------- embedding


def suite_embedding(T, trace, name="trace"):
    bad = trace_violations(T, trace)
    if not bad:
        return [record("embedding", name, "violated clauses == 0", 0, 0, True)]
    return [record("embedding", name, "violated clause", clause, None, False) for clause in bad]
