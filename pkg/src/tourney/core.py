"""Tournaments, generator families, the D_k checker and brute-force oracles."""

from dataclasses import dataclass
from functools import cached_property
from typing import Optional

import numpy as np

from . import rng


class InvalidParameter(ValueError):
    pass


class SizeLimitError(ValueError):
    """An exhaustive oracle was asked to run above its enforced cap."""


class FormatError(ValueError):
    pass


DK_SEARCH_MAX_N = 15
DK_SEARCH_MAX_K = 3


def _bits(mask):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


class Tournament:
    """A complete oriented graph on vertices ``0..n-1``.

    ``adj[u, v]`` is True iff the edge between u and v points u -> v.  The
    matrix is frozen on construction; ``out_bits``/``in_bits`` give the same
    rows as Python int bitsets for the set-heavy algorithms.
    """

    def __init__(self, adj, validate=True):
        adj = np.array(adj, dtype=bool, copy=True)
        if adj.ndim != 2 or adj.shape[0] != adj.shape[1] or adj.shape[0] < 1:
            raise InvalidParameter("adjacency must be a non-empty square matrix")
        if validate:
            if adj.diagonal().any():
                raise InvalidParameter("self-loop in adjacency matrix")
            off = ~np.eye(adj.shape[0], dtype=bool)
            if not np.array_equal((adj ^ adj.T) & off, off):
                raise InvalidParameter("adjacency is not a tournament")
        adj.flags.writeable = False
        self.adj = adj

    @property
    def n(self):
        return self.adj.shape[0]

    def __len__(self):
        return self.n

    def __eq__(self, other):
        return isinstance(other, Tournament) and np.array_equal(self.adj, other.adj)

    def __hash__(self):
        return hash(self.adj.tobytes())

    def __repr__(self):
        return f"Tournament(n={self.n})"

    def has_edge(self, u, v):
        return bool(self.adj[u, v])

    @cached_property
    def out_bits(self):
        return tuple(int.from_bytes(np.packbits(row, bitorder="little").tobytes(), "little") for row in self.adj)

    @cached_property
    def in_bits(self):
        return tuple(int.from_bytes(np.packbits(col, bitorder="little").tobytes(), "little") for col in self.adj.T)

    @cached_property
    def out_degree(self):
        d = self.adj.sum(axis=1)
        d.flags.writeable = False
        return d

    def edges(self):
        us, vs = np.nonzero(self.adj)
        return list(zip(us.tolist(), vs.tolist()))

    def subtournament(self, vertices):
        """Induced subtournament; vertex i of the result is ``vertices[i]``."""
        idx = np.asarray(vertices, dtype=np.intp)
        return Tournament(self.adj[np.ix_(idx, idx)], validate=False)

    def relabel(self, perm):
        """Tournament with vertex ``perm[v]`` playing the role of old vertex ``v``."""
        perm = np.asarray(perm, dtype=np.intp)
        inv = np.empty_like(perm)
        inv[perm] = np.arange(len(perm))
        return self.subtournament(inv)

    def is_transitive_sequence(self, seq):
        """True iff every edge inside ``seq`` points forward along the listed order."""
        idx = np.asarray(seq, dtype=np.intp)
        if len(idx) < 2:
            return True
        sub = self.adj[np.ix_(idx, idx)]
        return bool(sub[np.triu_indices(len(idx), 1)].all())


def validate_tournament(T):
    """Independent pairwise check of both tournament invariants."""
    n = T.n
    for u in range(n):
        if T.adj[u, u]:
            return False
        for v in range(u + 1, n):
            if int(T.adj[u, v]) + int(T.adj[v, u]) != 1:
                return False
    return True


# ---------------------------------------------------------------- generators


def _check_n(n):
    if int(n) != n or n < 1:
        raise InvalidParameter(f"n must be a positive integer, got {n!r}")


def gen_transitive(n):
    _check_n(n)
    return Tournament(np.triu(np.ones((n, n), dtype=bool), 1), validate=False)


def gen_dk(k):
    """D_k on classes {0..k-1}, {k..2k-1}, {2k..3k-1}; V1 -> V2 -> V3 -> V1."""
    if int(k) != k or k < 1:
        raise InvalidParameter(f"k must be a positive integer, got {k!r}")
    n = 3 * k
    adj = np.triu(np.ones((n, n), dtype=bool), 1)
    adj[:k, k : 2 * k] = True
    adj[k : 2 * k, 2 * k :] = True
    adj[2 * k :, :k] = True
    adj[:k, 2 * k :] = False
    return Tournament(adj, validate=False)


def gen_cyclic_blowup(n, k, seed=0):
    """k consecutive copies of D_{n/3k} with every cross-block edge pointing forward.

    Fully determined by (n, k); ``seed`` is accepted for a uniform generator
    signature.
    """
    _check_n(n)
    if int(k) != k or k < 1 or n % (3 * k):
        raise InvalidParameter(f"3k must divide n (n={n}, k={k})")
    b = n // (3 * k)
    adj = np.triu(np.ones((n, n), dtype=bool), 1)
    block = gen_dk(b).adj
    for i in range(k):
        s = 3 * b * i
        adj[s : s + 3 * b, s : s + 3 * b] = block
    return Tournament(adj, validate=False)


def gen_eps_random(n, eps, seed=0):
    """Transitive tournament with every edge reversed independently w.p. ``eps``."""
    _check_n(n)
    if not 0 <= eps <= 1:
        raise InvalidParameter(f"eps must lie in [0, 1], got {eps!r}")
    iu, ju = np.triu_indices(n, 1)
    flip = rng.stream(seed, "gen", "eps-random").random(len(iu)) < eps
    adj = np.zeros((n, n), dtype=bool)
    adj[iu[~flip], ju[~flip]] = True
    adj[ju[flip], iu[flip]] = True
    return Tournament(adj, validate=False)


def eligible_pair_count(n, min_length):
    g = max(int(min_length), 1)
    if g >= n:
        return 0
    span = n - g
    return span * (span + 1) // 2


def gen_planted_long(n, m, min_length, seed=0):
    """Transitive base with exactly ``m`` reversed edges of index gap >= ``min_length``.

    Pairs are drawn uniformly without replacement: rejection sampling over all
    pairs for up to 100*m attempts, then explicit enumeration of what is left.
    """
    _check_n(n)
    if m < 0 or min_length < 1 or min_length >= n:
        raise InvalidParameter(f"need 0 <= m and 1 <= min_length < n (m={m}, min_length={min_length}, n={n})")
    if m > eligible_pair_count(n, min_length):
        raise InvalidParameter(f"only {eligible_pair_count(n, min_length)} pairs have gap >= {min_length}, asked for {m}")
    gen = rng.stream(seed, "gen", "planted-long")
    chosen = []
    seen = set()
    attempts = 0
    while len(chosen) < m and attempts < 100 * m:
        attempts += 1
        i, j = gen.integers(0, n, size=2)
        i, j = int(min(i, j)), int(max(i, j))
        if j - i < min_length or (i, j) in seen:
            continue
        seen.add((i, j))
        chosen.append((i, j))
    if len(chosen) < m:
        rest = [(i, j) for i in range(n) for j in range(i + min_length, n) if (i, j) not in seen]
        picks = gen.choice(len(rest), size=m - len(chosen), replace=False)
        chosen.extend(rest[p] for p in sorted(picks.tolist()))
    adj = np.triu(np.ones((n, n), dtype=bool), 1)
    for i, j in chosen:
        adj[i, j] = False
        adj[j, i] = True
    return Tournament(adj, validate=False)


FAMILIES = ("transitive", "dk", "cyclic-blowup", "eps-random", "planted-long")


@dataclass
class GeneratorSpec:
    family: str
    n: Optional[int] = None
    k: Optional[int] = None
    m: Optional[int] = None
    eps: Optional[float] = None
    min_length: Optional[int] = None
    seed: int = 0

    _required = {
        "transitive": ("n",),
        "dk": ("k",),
        "cyclic-blowup": ("n", "k"),
        "eps-random": ("n", "eps"),
        "planted-long": ("n", "m", "min_length"),
    }

    def validate(self):
        if self.family not in FAMILIES:
            raise InvalidParameter(f"unknown family {self.family!r}; expected one of {', '.join(FAMILIES)}")
        missing = [f for f in self._required[self.family] if getattr(self, f) is None]
        if missing:
            raise InvalidParameter(f"family {self.family} needs {', '.join(missing)}")
        if self.n is not None and self.n < 1:
            raise InvalidParameter("n must be >= 1")
        if self.eps is not None and not 0 <= self.eps <= 1:
            raise InvalidParameter("eps must lie in [0, 1]")
        if not 0 <= self.seed < 2**64:
            raise InvalidParameter("seed must be a 64-bit unsigned integer")
        return self

    def generate(self):
        self.validate()
        f = self.family
        if f == "transitive":
            return gen_transitive(self.n)
        if f == "dk":
            return gen_dk(self.k)
        if f == "cyclic-blowup":
            return gen_cyclic_blowup(self.n, self.k, self.seed)
        if f == "eps-random":
            return gen_eps_random(self.n, self.eps, self.seed)
        return gen_planted_long(self.n, self.m, self.min_length, self.seed)


def random_tournament(n, seed=0):
    """Uniformly random labelled tournament (each edge a fair coin)."""
    return gen_eps_random(n, 0.5, seed)


# ---------------------------------------------------------------- D_k


@dataclass(frozen=True)
class DkEmbedding:
    k: int
    u1: tuple
    u2: tuple
    u3: tuple

    def __post_init__(self):
        for name in ("u1", "u2", "u3"):
            object.__setattr__(self, name, tuple(int(v) for v in getattr(self, name)))

    @property
    def vertices(self):
        return self.u1 + self.u2 + self.u3

    def to_dict(self):
        return {"k": self.k, "u1": list(self.u1), "u2": list(self.u2), "u3": list(self.u3)}

    @classmethod
    def from_dict(cls, d):
        return cls(int(d["k"]), d["u1"], d["u2"], d["u3"])


def dk_violations(T, emb):
    """Every violated D_k clause, as short human-readable strings (empty = valid)."""
    k = emb.k
    for v in emb.vertices:
        if not 0 <= v < T.n:
            raise InvalidParameter(f"vertex id {v} out of range for n={T.n}")
    out = []
    for name, cls in (("U1", emb.u1), ("U2", emb.u2), ("U3", emb.u3)):
        if len(cls) != k:
            out.append(f"{name} has {len(cls)} vertices, expected {k}")
    if len(set(emb.vertices)) != len(emb.vertices):
        out.append("classes are not pairwise disjoint")
    for name, cls in (("U1", emb.u1), ("U2", emb.u2), ("U3", emb.u3)):
        for a in range(len(cls)):
            for b in range(a + 1, len(cls)):
                if not T.adj[cls[a], cls[b]]:
                    out.append(f"{name} not transitive in listed order: {cls[b]}->{cls[a]}")
    for src_name, src, dst_name, dst in (("U1", emb.u1, "U2", emb.u2), ("U2", emb.u2, "U3", emb.u3), ("U3", emb.u3, "U1", emb.u1)):
        for x in src:
            for y in dst:
                if x != y and not T.adj[x, y]:
                    out.append(f"{src_name}->{dst_name} edge reversed: {y}->{x}")
    return out


def check_dk_embedding(T, emb):
    return not dk_violations(T, emb)


def transitive_sequences(T, mask, k):
    """Yield every k-vertex transitive subset of the bitset ``mask``, in its transitive order."""
    if k == 0:
        yield ()
        return
    out = T.out_bits
    for v in _bits(mask):
        for rest in transitive_sequences(T, out[v] & mask, k - 1):
            yield (v,) + rest


def brute_force_contains_dk(T, k):
    """Exhaustive D_k search (n <= 15, k <= 3); returns an embedding or None."""
    if T.n > DK_SEARCH_MAX_N or k > DK_SEARCH_MAX_K:
        raise SizeLimitError(f"brute-force D_k search capped at n <= {DK_SEARCH_MAX_N}, k <= {DK_SEARCH_MAX_K}")
    if k < 1:
        raise InvalidParameter("k must be >= 1")
    out, inn = T.out_bits, T.in_bits
    full = (1 << T.n) - 1
    for u1 in transitive_sequences(T, full, k):
        after1 = full
        before1 = full
        for v in u1:
            after1 &= out[v]
            before1 &= inn[v]
        for u2 in transitive_sequences(T, after1, k):
            cand = before1
            for v in u2:
                cand &= out[v]
            for u3 in transitive_sequences(T, cand, k):
                return DkEmbedding(k, u1, u2, u3)
    return None


# ---------------------------------------------------------------- text format


def serialize_tournament(T):
    rows = ("".join("1" if x else "0" for x in row) for row in T.adj)
    return f"{T.n}\n" + "\n".join(rows) + "\n"


def parse_tournament(text):
    lines = [ln.strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln]
    if not lines:
        raise FormatError("empty input")
    try:
        n = int(lines[0])
    except ValueError:
        raise FormatError(f"header must be the vertex count, got {lines[0]!r}") from None
    if n < 1:
        raise FormatError("vertex count must be positive")
    rows = lines[1:]
    if len(rows) != n:
        raise FormatError(f"expected {n} rows, got {len(rows)}")
    for i, row in enumerate(rows):
        if len(row) != n:
            raise FormatError(f"ragged row {i}: length {len(row)}, expected {n}")
        if set(row) - {"0", "1"}:
            raise FormatError(f"row {i} has characters other than 0/1")
    adj = np.array([[c == "1" for c in row] for row in rows], dtype=bool)
    loops = np.flatnonzero(adj.diagonal())
    if len(loops):
        raise FormatError(f"self-loop at vertex {loops[0]}")
    bad = np.argwhere(np.triu(adj == adj.T, 1))
    if len(bad):
        u, v = bad[0]
        raise FormatError(f"not a tournament: pair ({u}, {v})")
    return Tournament(adj, validate=False)


def read_tournament(path):
    with open(path) as fh:
        return parse_tournament(fh.read())


def write_tournament(T, path):
    with open(path, "w") as fh:
        fh.write(serialize_tournament(T))
