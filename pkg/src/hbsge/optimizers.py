"""First-order optimizers behind one stepping contract.

``step(config, state, x, problem)`` returns the next iterate and mutates
``state``. Each call makes exactly one gradient evaluation (NAG evaluates at
its look-ahead point, which is why the problem is passed rather than a
precomputed gradient).

Implemented methods:

- ``sgd``: x <- x - eta * g
- ``momentum``: v <- beta v + g;  x <- x - eta v   (raw accumulation)
- ``nag``: v <- beta v + grad(x - eta beta v);  x <- x - eta v
- ``adam``: bias-corrected first/second moments
- ``hbsge``: heavy-ball with a synthetic gradient g + alpha_t (g - g_prev),
  folded into an exponential moving average m <- beta m + (1 - beta) g~
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from enum import Enum

import numpy as np

from .exceptions import DimensionMismatch, UnknownMethod
from .numerics import DenseVector
from .problems import Problem


class Method(str, Enum):
    SGD = "sgd"
    MOMENTUM = "momentum"
    NAG = "nag"
    ADAM = "adam"
    HBSGE = "hbsge"


@dataclass(frozen=True)
class OptimizerConfig:
    method: Method
    eta: float
    beta: float = 0.9
    alpha_max: float = 1.2
    tau: float = 1000.0
    # False pins alpha_t = alpha_max at every step (no decay, no halving)
    adaptive: bool = True
    adam_beta1: float = 0.9
    adam_beta2: float = 0.999
    adam_eps: float = 1e-8
    label: str | None = None

    def __post_init__(self):
        try:
            object.__setattr__(self, "method", Method(self.method))
        except ValueError:
            raise UnknownMethod(f"unknown optimizer method {self.method!r}") from None
        if not self.eta > 0:
            raise ValueError(f"eta must be > 0, got {self.eta}")
        if not 0.0 <= self.beta < 1.0:
            raise ValueError(f"beta must lie in [0, 1), got {self.beta}")
        if not self.alpha_max >= 0:
            raise ValueError(f"alpha_max must be >= 0, got {self.alpha_max}")
        if not self.tau > 0:
            raise ValueError(f"tau must be > 0, got {self.tau}")

    @property
    def display_name(self) -> str:
        if self.label:
            return self.label
        if self.method in (Method.MOMENTUM, Method.NAG):
            return f"{_DISPLAY[self.method]}(beta={self.beta:g})"
        if self.method is Method.HBSGE:
            return f"HB-SGE(beta={self.beta:g})"
        return _DISPLAY[self.method]

    def with_eta(self, eta: float) -> OptimizerConfig:
        return replace(self, eta=eta)


_DISPLAY = {
    Method.SGD: "SGD",
    Method.MOMENTUM: "Momentum",
    Method.NAG: "NAG",
    Method.ADAM: "Adam",
    Method.HBSGE: "HB-SGE",
}


@dataclass
class OptimizerState:
    """Mutable per-run buffers. Create with :func:`init_state`."""

    t: int
    momentum: DenseVector
    prev_gradient: DenseVector | None = None
    prev_grad_norm: float = math.inf
    adam_m: DenseVector | None = None
    adam_v: DenseVector | None = None
    last_alpha: float | None = None
    grad_evals: int = field(default=0)


def init_state(config: OptimizerConfig, problem: Problem, x0: DenseVector) -> OptimizerState:
    """Zero buffers; HB-SGE also seeds g_{-1} with the gradient at x0."""
    x0 = np.asarray(x0, dtype=np.float64)
    if x0.shape != (problem.dim,):
        raise DimensionMismatch(f"x0 has shape {x0.shape}, problem dim is {problem.dim}")
    state = OptimizerState(t=0, momentum=np.zeros(problem.dim))
    if config.method is Method.HBSGE:
        g0 = problem.gradient(x0)
        state.prev_gradient = g0
        state.prev_grad_norm = float(np.linalg.norm(g0))
    elif config.method is Method.ADAM:
        state.adam_m = np.zeros(problem.dim)
        state.adam_v = np.zeros(problem.dim)
    return state


def adaptive_alpha(t: int, grad_norm: float, prev_grad_norm: float, alpha_max: float, tau: float) -> float:
    """Decayed extrapolation coefficient, halved when the gradient norm grew."""
    alpha = alpha_max * math.exp(-t / tau)
    if grad_norm > prev_grad_norm:
        alpha = 0.5 * alpha
    return alpha


def synthetic_gradient(g: DenseVector, g_prev: DenseVector, alpha: float) -> DenseVector:
    """g + alpha * (g - g_prev)."""
    g = np.asarray(g, dtype=np.float64)
    g_prev = np.asarray(g_prev, dtype=np.float64)
    if g.shape != g_prev.shape:
        raise DimensionMismatch(f"gradient shapes differ: {g.shape} vs {g_prev.shape}")
    return g + alpha * (g - g_prev)


def _sgd(cfg, state, x, problem):
    g = problem.gradient(x)
    return x - cfg.eta * g


def _momentum(cfg, state, x, problem):
    g = problem.gradient(x)
    state.momentum = cfg.beta * state.momentum + g
    return x - cfg.eta * state.momentum


def _nag(cfg, state, x, problem):
    lookahead = x - cfg.eta * cfg.beta * state.momentum
    g = problem.gradient(lookahead)
    state.momentum = cfg.beta * state.momentum + g
    return x - cfg.eta * state.momentum


def _adam(cfg, state, x, problem):
    g = problem.gradient(x)
    k = state.t + 1
    state.adam_m = cfg.adam_beta1 * state.adam_m + (1.0 - cfg.adam_beta1) * g
    state.adam_v = cfg.adam_beta2 * state.adam_v + (1.0 - cfg.adam_beta2) * g * g
    m_hat = state.adam_m / (1.0 - cfg.adam_beta1**k)
    v_hat = state.adam_v / (1.0 - cfg.adam_beta2**k)
    return x - cfg.eta * m_hat / (np.sqrt(v_hat) + cfg.adam_eps)


def _hbsge(cfg, state, x, problem):
    g = problem.gradient(x)
    grad_norm = float(np.linalg.norm(g))
    if cfg.adaptive:
        alpha = adaptive_alpha(state.t, grad_norm, state.prev_grad_norm, cfg.alpha_max, cfg.tau)
    else:
        alpha = cfg.alpha_max
    g_tilde = synthetic_gradient(g, state.prev_gradient, alpha)
    state.momentum = cfg.beta * state.momentum + (1.0 - cfg.beta) * g_tilde
    state.prev_gradient = g
    state.prev_grad_norm = grad_norm
    state.last_alpha = alpha
    return x - cfg.eta * state.momentum


_STEPPERS = {
    Method.SGD: _sgd,
    Method.MOMENTUM: _momentum,
    Method.NAG: _nag,
    Method.ADAM: _adam,
    Method.HBSGE: _hbsge,
}


def step(config: OptimizerConfig, state: OptimizerState, x: DenseVector, problem: Problem) -> DenseVector:
    """Advance one iteration and return x_{t+1}.

    Non-finite inputs are propagated, not rejected; the caller decides
    whether the run has diverged.
    """
    x = np.asarray(x, dtype=np.float64)
    if x.shape != state.momentum.shape:
        raise DimensionMismatch(f"x has shape {x.shape}, state has {state.momentum.shape}")
    with np.errstate(over="ignore", invalid="ignore"):
        x_next = _STEPPERS[config.method](config, state, x, problem)
    state.t += 1
    state.grad_evals += 1
    return x_next
