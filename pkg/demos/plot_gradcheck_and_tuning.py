"""
Gradient checks and learning-rate tuning
========================================

Verify analytic gradients against central differences, then pick the
largest grid learning rate at which plain gradient descent converges.
"""

import numpy as np

from hbsge import Beale, Rosenbrock, make_quadratic
from hbsge.harness import LR_GRID, initial_point, tune_learning_rate
from hbsge.numerics import SeededRng
from hbsge.problems import gradient_relative_error

rng = np.random.default_rng(0)
for problem in (Rosenbrock(), Beale(), make_quadratic(100, 10, seed=0)):
    errs = [gradient_relative_error(problem, rng.uniform(-3, 3, problem.dim)) for _ in range(100)]
    print(f"{problem.name:10s} worst relative error {max(errs):.2e}")

# the tuner probes the grid largest-first; at kappa=500 nothing converges
# within the budget and it warns before falling back to the smallest rate
for kappa in (10, 50, 100, 500):
    srng = SeededRng(42)
    problem = make_quadratic(kappa, 10, srng)
    x0 = initial_point("quadratic", srng, 10)
    print(f"kappa={kappa:4d} -> eta={tune_learning_rate(problem, LR_GRID, x0=x0)}")
