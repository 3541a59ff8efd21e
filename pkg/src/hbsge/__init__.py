"""Heavy-ball momentum with synthetic gradient extrapolation (HB-SGE).

A small first-order optimization library: SGD, heavy-ball momentum, NAG,
Adam and HB-SGE behind one ``step`` contract, the quadratic / Rosenbrock /
Beale benchmark problems, a deterministic benchmark harness, and per-mode
spectral stability analysis on quadratics.
"""

from .exceptions import (
    DimensionMismatch, HBSGEError, InvalidKappa, NotPositiveDefinite, UnknownMethod, UnsupportedSize,
)
from .harness import (
    ProblemSpec, RunConfig, RunResult, Status, TraceRow, build_suite, detect_divergence,
    initial_point, reference_suite, run, run_suite, tune_learning_rate,
)
from .numerics import SeededRng, random_orthogonal, small_spectral_radius, solve_spd, standard_normal
from .optimizers import (
    Method, OptimizerConfig, OptimizerState, adaptive_alpha, init_state, step, synthetic_gradient,
)
from .problems import (
    Beale, Problem, QuadraticProblem, Rosenbrock, beale_value_grad, finite_diff_gradient,
    make_quadratic, quadratic_value_grad, rosenbrock_value_grad,
)
from .stability import (
    Prediction, StabilityReport, hbsge_closed_form_eigen, mode_matrix, predict, theorem_alpha_bound,
)

__version__ = "0.1.0"
