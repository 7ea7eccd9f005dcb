"""Directed-triangle counts and the triangle-rich backward-edge filter."""

from dataclasses import dataclass, field
from fractions import Fraction
from math import comb

import numpy as np

from .core import InvalidParameter
from .ordering import check_prop21

ALPHA_CAP = Fraction(1, 2**16)


class HypothesisViolated(ValueError):
    pass


def as_fraction(x):
    """Exact rational from a Fraction, int, "p/q" string or decimal (via its repr)."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, np.integer)):
        return Fraction(int(x))
    if isinstance(x, str):
        return Fraction(x.strip())
    return Fraction(repr(float(x)))


def _square(T):
    A = T.adj.astype(np.float32 if T.n <= 4096 else np.float64)
    return A @ A


def count_directed_triangles(T):
    """Number of cyclic triples: sum over edges u->v of |N+(v) & N-(u)|, over 3."""
    if T.n < 3:
        return 0
    paths = _square(T)
    total = np.sum(paths * T.adj.T, dtype=np.float64)
    return int(round(total)) // 3


def edge_triangle_counts(T):
    """Matrix C with C[u, v] = number of x with v->x->u when u->v, else 0."""
    return np.where(T.adj, _square(T).T, 0).astype(np.int64)


def edge_triangle_count(T, u, v):
    if not (0 <= u < T.n and 0 <= v < T.n) or not T.adj[u, v]:
        raise InvalidParameter(f"{u}->{v} is not an edge")
    return (T.out_bits[v] & T.in_bits[u]).bit_count()


def transitive_triple_count(T):
    d = T.out_degree
    return int(sum(comb(int(x), 2) for x in d))


@dataclass
class TriangleRichSet:
    """Long backward edges whose endpoints have small backward degree.

    ``edges`` are (tail, head) vertex pairs and ``positions`` the matching
    (i, j) order positions.  ``threshold_sq`` is 16|B| = (4 alpha^{1/2} n)^2,
    the exact square of the degree bound.
    """

    edges: list
    positions: list
    per_edge_count: dict
    alpha: Fraction
    threshold_sq: int
    num_long: int
    s_minus: list = field(default_factory=list)
    s_plus: list = field(default_factory=list)

    @property
    def threshold(self):
        return float(np.sqrt(self.threshold_sq))

    @property
    def min_count(self):
        return min(self.per_edge_count.values()) if self.per_edge_count else 0


def _rich_filter(T, analysis):
    n = analysis.n
    order = np.asarray(analysis.order)
    B = analysis.num_backward
    thr_sq = 16 * B
    din = np.bincount(analysis.bi, minlength=n)  # backward edges into position i
    dout = np.bincount(analysis.bj, minlength=n)  # backward edges out of position j
    lm = analysis.long_mask
    bi, bj = analysis.bi[lm], analysis.bj[lm]
    keep = (din[bi] ** 2 <= thr_sq) | (dout[bj] ** 2 <= thr_sq)
    bi, bj = bi[keep], bj[keep]
    edges = list(zip(order[bj].tolist(), order[bi].tolist()))
    counts = {(t, h): edge_triangle_count(T, t, h) for t, h in edges}
    s_minus = order[np.flatnonzero(din**2 >= thr_sq)].tolist() if B else []
    s_plus = order[np.flatnonzero(dout**2 >= thr_sq)].tolist() if B else []
    return TriangleRichSet(
        edges,
        list(zip(bi.tolist(), bj.tolist())),
        counts,
        analysis.alpha,
        thr_sq,
        analysis.num_long,
        s_minus,
        s_plus,
    )


def triangle_rich_diagnostics(T, analysis):
    """The same filter and counts with no hypothesis checks."""
    return _rich_filter(T, analysis)


def extract_triangle_rich(T, analysis):
    """Keep long backward edges with a low-backward-degree endpoint.

    Requires alpha <= 2^-16, 4|B'| >= |B| and a locally optimal order; under
    those, at least half of B' survives and every survivor lies in at least
    floor(n/64) directed triangles.
    """
    if analysis.alpha > ALPHA_CAP:
        raise HypothesisViolated(f"alpha = {analysis.alpha} exceeds 2^-16")
    if 4 * analysis.num_long < analysis.num_backward:
        raise HypothesisViolated(f"4|B'| = {4 * analysis.num_long} < |B| = {analysis.num_backward}")
    bad = check_prop21(T, analysis.order, limit=1)
    if bad:
        v = bad[0]
        raise HypothesisViolated(f"order is not locally optimal: {v.kind}-degree {v.degree} < {v.span}/2 at ({v.i}, {v.j})")
    return _rich_filter(T, analysis)


def measure_triangle_constant(T, eps, triangles=None):
    """triangles / (eps^2 n^3), exactly."""
    eps = as_fraction(eps)
    if eps <= 0:
        raise InvalidParameter("eps must be positive")
    if triangles is None:
        triangles = count_directed_triangles(T)
    return Fraction(triangles) / (eps * eps * T.n**3)
