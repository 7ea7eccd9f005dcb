"""
Long backward edges or a denser window
======================================

Given alpha >= eps, either a quarter of the backward edges are long
(length >= n/16), or some window of n/8 consecutive positions is twice as
dense.  Certificates use exact rationals and can be recounted.
"""

from fractions import Fraction

import numpy as np

from tourney import Tournament, analyze_ordering, long_or_boost, random_tournament
from tourney.core import gen_dk

# lots of long edges: the block order of D_4
T = gen_dk(4)
an = analyze_ordering(T, list(range(12)))
print(long_or_boost(T, an, Fraction(1, 9)))

# short noise packed in one spot: transitive except one random block of 16
n = 256
A = np.triu(np.ones((n, n), dtype=bool), 1)
A[100:116, 100:116] = random_tournament(16, seed=3).adj
W = Tournament(A)
an = analyze_ordering(W, list(range(n)))
res = long_or_boost(W, an, an.alpha)
print(res.variant, "at positions", res.start, "..", res.start + res.width - 1)
print("inside:", res.backward_count, ">= 2 eps w^2 =", float(2 * an.alpha * res.width**2))
