"""
Generating tournaments and writing them to disk
===============================================

Every instance in this package comes from a named family and a seed, and
the text format is stable enough to diff.
"""

# a tournament is a frozen boolean adjacency matrix
from tourney import GeneratorSpec, gen_dk, gen_eps_random, parse_tournament, serialize_tournament

D2 = gen_dk(2)
print(serialize_tournament(D2))

# three classes of two vertices: {0,1} -> {2,3} -> {4,5} -> {0,1}
print("edges:", sorted(D2.edges()))

# noisy transitive tournaments: each forward pair flips with probability eps
T = gen_eps_random(12, 0.2, seed=7)
assert T == gen_eps_random(12, 0.2, seed=7)
print("out-degrees:", T.out_degree.tolist())

# the same thing through a spec object, as the CLI and experiments use it
spec = GeneratorSpec("planted-long", n=64, m=3, min_length=20, seed=1)
P = spec.generate()
text = serialize_tournament(P)
assert parse_tournament(text) == P
print("planted backward pairs:", [(u, v) for u, v in P.edges() if u > v])
