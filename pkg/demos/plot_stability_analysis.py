"""
Predicting divergence from the iteration matrix
===============================================

On a quadratic every eigenmode evolves independently, so a small matrix
per mode decides whether a method converges. Compare the predictions with
actual runs, and compare the exact HB-SGE radius with the scalar formula.
"""

import numpy as np

from hbsge import Method, OptimizerConfig, RunConfig, make_quadratic, run
from hbsge.harness import initial_point
from hbsge.numerics import SeededRng
from hbsge.stability import mode_matrix, predict

rng = SeededRng(42)
problem = make_quadratic(50, 10, rng)
x0 = initial_point("quadratic", rng, 10)

for method in (Method.SGD, Method.MOMENTUM, Method.NAG, Method.HBSGE):
    opt = OptimizerConfig(method, 0.05, beta=0.9)
    report = predict(problem, opt)
    outcome = run(problem, opt, RunConfig(), x0).status.value
    print(f"{opt.display_name:18s} max rho={report.max_rho:.4f} predicted={report.predicted.value:9s} "
          f"observed={outcome}")

# the scalar formula drops the moving-average factor and disagrees badly
report = predict(problem, OptimizerConfig(Method.HBSGE, 0.05, beta=0.9))
print("closed form at top mode:", report.closed_form_hbsge[-1])
print("exact radius at top mode:", report.per_mode[-1][1])
print("alpha bound 2/(eta L) - 1:", report.alpha_bound)
for note in report.notes:
    print("note:", note)

# the top-mode matrix itself
print(np.array2string(mode_matrix(Method.HBSGE, 50.0, 0.05, 0.9, 1.2), precision=4))
