"""
Finding D_k
===========

The search orders the tournament, descends into denser windows while it
can, then tries to build D_k from edges that lie in many triangles:
tripartition, dependent random choice, greedy transitive subsets, a
matching and a complete-bipartite extraction.  Whatever it returns is
checked against the tournament, and the whole trace can be re-verified.
"""

import json
from fractions import Fraction

from tourney import PipelineConfig, check_dk_embedding, gen_eps_random, search_dk, trace_violations
from tourney.embed import trace_from_dict, trace_to_dict

T = gen_eps_random(2000, 0.15, seed=0)
report = search_dk(T, 3, Fraction(3, 20), PipelineConfig(seed=1))
trace = report.trace
print("found:", report.found, "via", trace.branch)
print("U1 =", trace.result.u1, "U2 =", trace.result.u2, "U3 =", trace.result.u3)
print("valid:", check_dk_embedding(T, trace.result))

# the JSON form carries every intermediate set, so a third party can recheck it
doc = json.dumps(trace_to_dict(trace))
print(f"trace is {len(doc) // 1024} KiB; violated clauses: {trace_violations(T, trace_from_dict(json.loads(doc)))}")

# paper-sized parameters need far more vertices than a laptop holds: on a
# sparse planted instance the triangle-rich branch runs and stops early
from tourney import gen_planted_long

P = gen_planted_long(2048, 60, 128, seed=0)
paper = search_dk(P, 2, Fraction(1, 2**20), PipelineConfig(mode="paper", seed=1, partition_retries=3))
for a in paper.attempts:
    print(a["branch"], "->", a.get("stage"), a.get("message", ""))
