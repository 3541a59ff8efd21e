"""
Condition number sweep on random quadratics
===========================================

Build quadratics with prescribed condition number, run the reference grid
over a few seeds and print the median summary table.
"""

from hbsge import RunConfig, build_suite, run_suite
from hbsge.harness import ProblemSpec
from hbsge.tables import median_summary, summary_to_markdown

problems = [ProblemSpec("quadratic", 0.1, kappa=10), ProblemSpec("quadratic", 0.05, kappa=50)]
suite = build_suite(problems)

results = []
for seed in (41, 42, 43):
    results += run_suite(suite, RunConfig(seed=seed))

# one row per (problem, optimizer); divergences are listed under the table
print(summary_to_markdown(median_summary(results), results))
