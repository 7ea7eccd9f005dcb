"""
Directed triangles
==================

Counting cyclic triples, the constant c' = triangles / (eps^2 n^3), and the
long backward edges that each sit in many triangles.
"""

from tourney import count_directed_triangles, extract_triangle_rich, measure_triangle_constant
from tourney import analyze_ordering, gen_cyclic_blowup, gen_planted_long, local_search_ordering

T = gen_cyclic_blowup(36, 4)
print("triangles:", count_directed_triangles(T), "= k (n/3k)^3 =", 4 * 3**3)
print("c' at eps = 1/36:", measure_triangle_constant(T, "1/36"))

# a nearly transitive tournament with 60 long reversed edges
P = gen_planted_long(2048, 60, 128, seed=0)
an = analyze_ordering(P, local_search_ordering(P, 0))
rich = extract_triangle_rich(P, an)
print(f"alpha = {float(an.alpha):.2e}; kept {len(rich.edges)} of {an.num_long} long edges")
print(f"fewest triangles through a kept edge: {rich.min_count} (need {P.n // 64})")
