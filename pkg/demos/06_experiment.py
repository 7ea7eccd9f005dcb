"""
Seeded sweeps to CSV
====================

An experiment crosses (n, k, eps) points with seeds.  Rows come out in
config order and rerunning gives the same bytes.
"""

from fractions import Fraction

from tourney.core import GeneratorSpec
from tourney.experiment import ExperimentConfig, run_experiment

cfg = ExperimentConfig(
    family=GeneratorSpec("eps-random"),
    sweep=[(300, 2, Fraction(1, 10)), (300, 3, Fraction(1, 5))],
    seeds=[0, 1, 2],
    budget=30,
)
text, _ = run_experiment(cfg)
print(text)
assert run_experiment(cfg)[0] == text
