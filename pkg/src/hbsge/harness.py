"""Deterministic run loop, learning-rate tuning and benchmark suites."""

from __future__ import annotations

import math
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from enum import Enum

import numpy as np

from .numerics import DenseVector, SeededRng, mix_seed, standard_normal
from .optimizers import Method, OptimizerConfig, init_state, step
from .problems import Beale, Problem, Rosenbrock, make_quadratic

LR_GRID = (0.1, 0.05, 0.01, 0.005, 0.001)

ROSENBROCK_START = (-1.2, 1.0)
BEALE_START = (1.0, 1.0)


class Status(str, Enum):
    CONVERGED = "Converged"
    STAGNATED = "Stagnated"
    DIVERGED = "Diverged"


@dataclass(frozen=True)
class RunConfig:
    max_iters: int = 1000
    tol_primary: float = 1e-3
    tol_high: float = 1e-6
    x_explode: float = 1e10
    f_explode: float = 1e10
    seed: int = 0
    # End the run as soon as tol_primary is hit instead of running out the budget.
    stop_at_tolerance: bool = False

    def __post_init__(self):
        if not self.tol_high < self.tol_primary:
            raise ValueError("tol_high must be smaller than tol_primary")
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")


@dataclass
class TraceRow:
    t: int
    f: float
    grad_norm: float
    dist_to_opt: float | None = None
    # coefficient used by the step taken from this iterate (HB-SGE only)
    alpha_t: float | None = None


@dataclass
class RunResult:
    status: Status
    iters_to_primary: int | None
    iters_to_high: int | None
    divergence_iter: int | None
    final_f: float
    final_grad_norm: float
    final_dist: float | None
    max_iters: int
    trace: list[TraceRow] = field(default_factory=list, repr=False)
    problem: str = ""
    optimizer: str = ""
    seed: int | None = None

    @property
    def total_iters(self) -> int:
        """Index of the last recorded iterate."""
        if self.divergence_iter is not None:
            return self.divergence_iter
        return self.trace[-1].t if self.trace else self.max_iters


def detect_divergence(x: DenseVector, f: float, cfg: RunConfig = RunConfig()) -> bool:
    """True when the iterate or objective exploded or went non-finite."""
    x = np.asarray(x, dtype=np.float64)
    if not (np.all(np.isfinite(x)) and math.isfinite(f)):
        return True
    return bool(np.linalg.norm(x) > cfg.x_explode or f > cfg.f_explode)


def initial_point(kind: str, rng: SeededRng | None = None, dim: int = 10) -> DenseVector:
    """Starting point per problem family; quadratics draw N(0, 4I)."""
    if kind == "rosenbrock":
        return np.array(ROSENBROCK_START)
    if kind == "beale":
        return np.array(BEALE_START)
    if kind == "quadratic":
        if rng is None:
            raise ValueError("quadratic starting points need an rng")
        return 2.0 * standard_normal(rng, dim)
    raise ValueError(f"unknown problem kind {kind!r}")


def _evaluate(problem: Problem, x: DenseVector) -> tuple[float, float, float | None]:
    with np.errstate(over="ignore", invalid="ignore"):
        f, g = problem.value_grad(x)
        grad_norm = float(np.linalg.norm(g))
        dist = None if problem.optimum is None else float(np.linalg.norm(x - problem.optimum))
    return float(f), grad_norm, dist


def run(problem: Problem, opt: OptimizerConfig, cfg: RunConfig, x0: DenseVector) -> RunResult:
    """Iterate ``opt`` on ``problem`` from ``x0`` for up to ``cfg.max_iters`` steps.

    The loop keeps going after tol_primary is reached (unless
    ``cfg.stop_at_tolerance``) so the high-precision and final columns are
    filled in. Divergence is checked on every new iterate and stops the run.
    """
    x = np.array(x0, dtype=np.float64)
    state = init_state(opt, problem, x)

    f, gnorm, dist = _evaluate(problem, x)
    trace = [TraceRow(0, f, gnorm, dist)]
    hit_primary = 0 if gnorm < cfg.tol_primary else None
    hit_high = 0 if gnorm < cfg.tol_high else None
    diverged_at = None

    for t in range(1, cfg.max_iters + 1):
        if cfg.stop_at_tolerance and hit_primary is not None:
            break
        x = step(opt, state, x, problem)
        trace[-1].alpha_t = state.last_alpha
        f, gnorm, dist = _evaluate(problem, x)
        trace.append(TraceRow(t, f, gnorm, dist))
        if detect_divergence(x, f, cfg):
            diverged_at = t
            break
        if hit_primary is None and gnorm < cfg.tol_primary:
            hit_primary = t
        if hit_high is None and gnorm < cfg.tol_high:
            hit_high = t

    if diverged_at is not None:
        status = Status.DIVERGED
    elif hit_primary is not None:
        status = Status.CONVERGED
    else:
        status = Status.STAGNATED
    last = trace[-1]
    return RunResult(
        status=status,
        iters_to_primary=hit_primary,
        iters_to_high=hit_high,
        divergence_iter=diverged_at,
        final_f=last.f,
        final_grad_norm=last.grad_norm,
        final_dist=last.dist_to_opt,
        max_iters=cfg.max_iters,
        trace=trace,
        problem=problem.name,
        optimizer=opt.display_name,
        seed=cfg.seed,
    )


def tune_learning_rate(problem: Problem, grid=LR_GRID, cfg: RunConfig = RunConfig(),
                       x0: DenseVector | None = None) -> float:
    """Largest grid value at which plain SGD reaches tol_primary within budget.

    If none qualifies, warns and returns the smallest grid value.
    """
    grid = sorted(set(grid), reverse=True)
    if not grid:
        raise ValueError("empty learning-rate grid")
    if x0 is None:
        x0 = initial_point(problem.kind, SeededRng(cfg.seed), problem.dim)
    probe = replace(cfg, stop_at_tolerance=True)
    for eta in grid:
        result = run(problem, OptimizerConfig(Method.SGD, eta), probe, x0)
        if result.status is Status.CONVERGED:
            return eta
    warnings.warn(f"no learning rate in {grid} lets SGD converge on {problem.name}; "
                  f"falling back to {grid[-1]}", stacklevel=2)
    return grid[-1]


# --- suites -------------------------------------------------------------------

DEFAULT_BUDGETS = {"quadratic": 1000, "rosenbrock": 5000, "beale": 5000}


@dataclass(frozen=True)
class ProblemSpec:
    """Recipe for a benchmark problem plus the learning rate it is run at."""

    kind: str
    eta: float
    kappa: float | None = None
    d: int = 10
    max_iters: int | None = None

    def __post_init__(self):
        if self.kind not in DEFAULT_BUDGETS:
            raise ValueError(f"unknown problem kind {self.kind!r}")
        if self.kind == "quadratic" and self.kappa is None:
            raise ValueError("quadratic problems need kappa")

    @property
    def label(self) -> str:
        if self.kind == "quadratic":
            return f"Quadratic(kappa={self.kappa:g})"
        return self.kind.capitalize()

    @property
    def slug(self) -> str:
        if self.kind == "quadratic":
            return f"quad-k{self.kappa:g}"
        return self.kind

    @property
    def budget(self) -> int:
        return self.max_iters or DEFAULT_BUDGETS[self.kind]

    def build(self, seed: int, index: int) -> tuple[Problem, DenseVector]:
        """Instantiate the problem and its starting point from one stream.

        Stream order: Q's Gaussian matrix, then b, then x0.
        """
        rng = SeededRng(mix_seed(seed, index))
        if self.kind == "quadratic":
            problem: Problem = make_quadratic(self.kappa, self.d, rng)
            problem.name = self.label
            return problem, initial_point("quadratic", rng, self.d)
        problem = Rosenbrock() if self.kind == "rosenbrock" else Beale()
        problem.name = self.label
        return problem, initial_point(self.kind)


SuiteEntry = tuple[ProblemSpec, list[OptimizerConfig]]


def reference_optimizers(eta: float) -> list[OptimizerConfig]:
    """The six configurations compared per problem; Adam runs at eta / 2."""
    return [
        OptimizerConfig(Method.SGD, eta),
        OptimizerConfig(Method.MOMENTUM, eta, beta=0.9),
        OptimizerConfig(Method.NAG, eta, beta=0.9),
        OptimizerConfig(Method.ADAM, 0.5 * eta),
        OptimizerConfig(Method.HBSGE, eta, beta=0.9),
        OptimizerConfig(Method.HBSGE, eta, beta=0.95, label="HB-SGE-Safe(beta=0.95)"),
    ]


REFERENCE_PROBLEMS = (
    ProblemSpec("quadratic", 0.1, kappa=10),
    ProblemSpec("quadratic", 0.05, kappa=50),
    ProblemSpec("quadratic", 0.01, kappa=100),
    ProblemSpec("quadratic", 0.005, kappa=500),
    ProblemSpec("rosenbrock", 0.005),
    ProblemSpec("beale", 0.01),
)


def build_suite(problems, optimizers: list[OptimizerConfig] | None = None) -> list[SuiteEntry]:
    """Pair each problem with optimizer templates at the problem's learning rate.

    Templates' own ``eta`` is ignored; Adam templates get half the problem's rate.
    """
    suite = []
    for spec in problems:
        if optimizers is None:
            configs = reference_optimizers(spec.eta)
        else:
            configs = [
                o.with_eta(0.5 * spec.eta if o.method is Method.ADAM else spec.eta)
                for o in optimizers
            ]
        suite.append((spec, configs))
    return suite


def reference_suite() -> list[SuiteEntry]:
    return build_suite(REFERENCE_PROBLEMS)


def _run_cell(args) -> RunResult:
    spec, index, opt, cfg = args
    problem, x0 = spec.build(cfg.seed, index)
    return run(problem, opt, replace(cfg, max_iters=spec.budget), x0)


def suite_cells(suite: list[SuiteEntry], cfg: RunConfig):
    return [(spec, i, opt, cfg) for i, (spec, opts) in enumerate(suite) for opt in opts]


def run_suite(suite: list[SuiteEntry], cfg: RunConfig = RunConfig(), jobs: int = 1) -> list[RunResult]:
    """Run every (problem, optimizer) cell; results follow suite order.

    Each problem index gets its own stream derived from (cfg.seed, index), so
    all optimizers on a problem share the instance and starting point.
    """
    cells = suite_cells(suite, cfg)
    if jobs > 1 and len(cells) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(_run_cell, cells))
    return [_run_cell(c) for c in cells]

