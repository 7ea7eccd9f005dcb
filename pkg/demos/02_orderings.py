"""
Orderings and backward edges
============================

The distance of a tournament from transitive is the fewest backward edges
any vertex order leaves.  Small cases are solved exactly; larger ones get
a relocation-stable local search.
"""

from fractions import Fraction

from tourney import analyze_ordering, check_prop21, exact_min_backward, gen_cyclic_blowup, gen_eps_random, local_search_ordering

# exact subset DP: the blow-up of the 3-cycle into 2 blocks of 3
T = gen_cyclic_blowup(18, 2)
order, best = exact_min_backward(T)
print(f"exact minimum backward edges: {best}, distance {Fraction(best, T.n**2)}")

# no single vertex can be moved to reduce the count, so these degree checks pass
print("violations on the exact order:", check_prop21(T, order))

# at n = 1000 only the heuristic is affordable
N = gen_eps_random(1000, 0.05, seed=3)
an = analyze_ordering(N, local_search_ordering(N, seed=0))
print(f"|B| = {an.num_backward}, alpha = {float(an.alpha):.5f}, long (>= {an.long_threshold}): {an.num_long}")
