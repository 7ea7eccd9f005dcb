"""Vertex orderings, backward edges and the long-edge / dense-window dichotomy."""

from dataclasses import dataclass, field
from fractions import Fraction
from math import ceil
from typing import Optional

import numpy as np

from . import rng
from .core import InvalidParameter, SizeLimitError

EXACT_MAX_N = 22


def _as_order(order, n):
    order = np.asarray(order, dtype=np.intp)
    if order.shape != (n,) or not np.array_equal(np.sort(order), np.arange(n)):
        raise InvalidParameter("order must be a permutation of 0..n-1")
    return order


def positional(T, order):
    """Adjacency re-indexed by position: ``P[a, b]`` iff order[a] -> order[b]."""
    return T.adj[np.ix_(order, order)]


def backward_count(T, order):
    order = _as_order(order, T.n)
    return int(np.tril(positional(T, order), -1).sum())


def exact_min_backward(T):
    """Minimum number of backward edges over all orderings, by subset DP.

    ``best[S]`` is the fewest backward edges among orderings that place the
    set S first.  Appending v after S costs the number of edges from v back
    into S.  Runs layer by layer over |S| with vectorized popcounts.
    """
    n = T.n
    if n > EXACT_MAX_N:
        raise SizeLimitError(f"exact ordering is capped at n <= {EXACT_MAX_N}")
    full = (1 << n) - 1
    masks = np.arange(full + 1, dtype=np.uint32)
    sizes = np.bitwise_count(masks)
    by_size = np.argsort(sizes, kind="stable").astype(np.uint32)
    bounds = np.concatenate(([0], np.cumsum(np.bincount(sizes, minlength=n + 1))))
    out = np.array(T.out_bits, dtype=np.uint32)

    best = np.zeros(full + 1, dtype=np.int32)
    last = np.zeros(full + 1, dtype=np.int8)
    for c in range(1, n + 1):
        layer = by_size[bounds[c] : bounds[c + 1]]
        cur = np.full(len(layer), np.iinfo(np.int32).max, dtype=np.int32)
        arg = np.zeros(len(layer), dtype=np.int8)
        for v in range(n):
            has = ((layer >> v) & 1).astype(bool)
            prev = layer[has] ^ np.uint32(1 << v)
            cost = best[prev] + np.bitwise_count(prev & out[v]).astype(np.int32)
            sel = np.flatnonzero(has)
            better = cost < cur[sel]
            cur[sel[better]] = cost[better]
            arg[sel[better]] = v
        best[layer] = cur
        last[layer] = arg

    order = []
    S = full
    while S:
        v = int(last[S])
        order.append(v)
        S ^= 1 << v
    order.reverse()
    return order, int(best[full])


def _initial_order(T, seed):
    tiebreak = rng.stream(seed, "ordering", "initial").permutation(T.n)
    return np.lexsort((tiebreak, -T.out_degree.astype(np.int64)))


def local_search_ordering(T, seed=0, initial=None):
    """Relocation-stable ordering.

    Start from the score order (out-degree descending, seeded tie-break) or
    ``initial``; sweep vertices by id and move each to its best position
    (leftmost on ties) whenever that strictly lowers the backward count.
    Stops when a full sweep makes no move, so no single-vertex relocation can
    improve the result.
    """
    n = T.n
    order = _initial_order(T, seed) if initial is None else _as_order(initial, n).copy()
    if n < 2:
        return order.tolist()
    sign = np.where(T.adj, 1, -1).astype(np.int8)
    pos = np.empty(n, dtype=np.intp)
    pos[order] = np.arange(n)
    moved = True
    while moved:
        moved = False
        for v in range(n):
            p = pos[v]
            s = sign[v, order].astype(np.int32)
            s[p] = 0
            cs = np.cumsum(s)
            delta = np.empty(n, dtype=np.int32)
            # left of p: v jumps over order[q..p-1]; right of p: over order[p+1..q]
            delta[:p] = -(cs[p] - cs[:p] + s[:p])
            delta[p:] = cs[p:] - cs[p]
            q = int(np.argmin(delta))
            if delta[q] >= 0:
                continue
            if q < p:
                order[q + 1 : p + 1] = order[q:p].copy()
                lo, hi = q, p
            else:
                order[p:q] = order[p + 1 : q + 1].copy()
                lo, hi = p, q
            order[q] = v
            pos[order[lo : hi + 1]] = np.arange(lo, hi + 1)
            moved = True
    return order.tolist()


@dataclass
class OrderingAnalysis:
    """Backward edges of a tournament under a fixed ordering.

    ``bi``/``bj`` are the positions i < j of each backward edge, which points
    order[j] -> order[i]; its length is j - i.  Edges are sorted by (i, j).
    """

    order: tuple
    bi: np.ndarray
    bj: np.ndarray
    long_threshold: int
    long_mask: np.ndarray = field(repr=False)

    @property
    def n(self):
        return len(self.order)

    @property
    def num_backward(self):
        return len(self.bi)

    @property
    def alpha(self):
        return Fraction(self.num_backward, self.n**2)

    @property
    def lengths(self):
        return self.bj - self.bi

    @property
    def num_long(self):
        return int(self.long_mask.sum())

    @property
    def backward(self):
        return [(int(i), int(j), int(j - i)) for i, j in zip(self.bi, self.bj)]

    @property
    def long_edges(self):
        return [(int(i), int(j), int(j - i)) for i, j in zip(self.bi[self.long_mask], self.bj[self.long_mask])]

    def vertex_edges(self, mask=None):
        """Backward edges as (tail, head) vertex pairs, i.e. order[j] -> order[i]."""
        bi, bj = (self.bi, self.bj) if mask is None else (self.bi[mask], self.bj[mask])
        order = np.asarray(self.order)
        return list(zip(order[bj].tolist(), order[bi].tolist()))


def analyze_ordering(T, order):
    order = _as_order(order, T.n)
    P = positional(T, order)
    bi, bj = np.nonzero(np.triu(P.T, 1))
    thr = ceil(T.n / 16)
    return OrderingAnalysis(tuple(order.tolist()), bi, bj, thr, (bj - bi) >= thr)


@dataclass
class Prop21Violation:
    kind: str  # "out" for the left endpoint bullet, "in" for the right endpoint bullet
    i: int
    j: int
    degree: int
    span: int


def check_prop21(T, order, limit=None):
    """Every pair i < j where a local-optimality degree condition fails.

    "out": v_i has fewer than (j-i)/2 out-neighbours among positions i+1..j.
    "in":  v_j has fewer than (j-i)/2 in-neighbours among positions i..j-1.
    """
    order = _as_order(order, T.n)
    n = T.n
    P = positional(T, order).astype(np.int32)
    rows = np.cumsum(P, axis=1)
    cols = np.vstack([np.zeros((1, n), dtype=np.int32), np.cumsum(P, axis=0)])
    ii, jj = np.triu_indices(n, 1)
    span = jj - ii
    out_deg = rows[ii, jj] - rows[ii, ii]
    in_deg = cols[jj, jj] - cols[ii, jj]
    found = []
    for kind, deg in (("out", out_deg), ("in", in_deg)):
        bad = np.flatnonzero(2 * deg < span)
        for b in bad[: None if limit is None else max(0, limit - len(found))]:
            found.append(Prop21Violation(kind, int(ii[b]), int(jj[b]), int(deg[b]), int(span[b])))
    return found


@dataclass
class DichotomyResult:
    """Outcome of the long-edge / dense-window split.

    ``variant`` is "long-edges", "dense-window" or "no-certificate".  For a
    dense window, positions start..start+width-1 of the analysed order hold
    ``backward_count`` backward edges.
    """

    variant: str
    eps: Fraction
    num_backward: int
    num_long: int = 0
    start: Optional[int] = None
    width: Optional[int] = None
    backward_count: Optional[int] = None
    reason: str = ""

    @property
    def is_long(self):
        return self.variant == "long-edges"

    @property
    def is_window(self):
        return self.variant == "dense-window"

    def window_positions(self):
        return range(self.start, self.start + self.width)


def _window_ok(count, width, eps):
    # count >= 2 * eps * width^2, exactly
    return count * eps.denominator >= 2 * eps.numerator * width * width


def window_counts(analysis, width):
    """Backward edges inside each window [s, s+width) for s = 0..n-width."""
    n = analysis.n
    nw = n - width + 1
    bi, bj = analysis.bi, analysis.bj
    inside = (bj - bi) < width
    lo = np.maximum(bj[inside] - width + 1, 0)
    hi = np.minimum(bi[inside], nw - 1)
    keep = lo <= hi
    diff = np.zeros(nw + 1, dtype=np.int64)
    np.add.at(diff, lo[keep], 1)
    np.add.at(diff, hi[keep] + 1, -1)
    return np.cumsum(diff)[:nw]


def long_or_boost(T, analysis, eps):
    """Either enough long backward edges, or a window that is twice as dense.

    Exact rational arithmetic throughout; never returns a certificate whose
    inequality fails.
    """
    eps = Fraction(eps)
    n = analysis.n
    B = analysis.num_backward
    nl = analysis.num_long
    if eps <= 0:
        raise InvalidParameter("eps must be positive")
    if B == 0 or analysis.alpha < eps:
        return DichotomyResult("no-certificate", eps, B, nl, reason=f"alpha={analysis.alpha} < eps={eps}")
    if 4 * nl >= B:
        return DichotomyResult("long-edges", eps, B, nl)
    if n < 16:
        return DichotomyResult("no-certificate", eps, B, nl, reason="n < 16")
    w = n // 8
    counts = window_counts(analysis, w)
    for s in (0, n - w):
        if _window_ok(int(counts[s]), w, eps):
            return DichotomyResult("dense-window", eps, B, nl, start=s, width=w, backward_count=int(counts[s]))
    s = int(np.argmax(counts))
    if _window_ok(int(counts[s]), w, eps):
        return DichotomyResult("dense-window", eps, B, nl, start=s, width=w, backward_count=int(counts[s]))
    return DichotomyResult("no-certificate", eps, B, nl, reason=f"densest window holds {int(counts[s])} < 2*eps*{w}^2")
