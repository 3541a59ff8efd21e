"""Benchmark objectives: ill-conditioned quadratics, Rosenbrock and Beale.

Each problem exposes ``value``, ``gradient`` and ``value_grad`` on float64
vectors. Overflow is not trapped; NaN/Inf are returned as computed so the
harness can see them.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .exceptions import DimensionMismatch, InvalidKappa
from .numerics import DenseMatrix, DenseVector, SeededRng, random_orthogonal, solve_spd, standard_normal


class Problem:
    """Objective contract shared by every benchmark function."""

    name: str = "problem"
    kind: str = "generic"
    dim: int = 0
    optimum: DenseVector | None = None
    lipschitz_L: float | None = None
    strong_mu: float | None = None

    def value_grad(self, x: DenseVector) -> tuple[float, DenseVector]:
        raise NotImplementedError

    def value(self, x: DenseVector) -> float:
        return self.value_grad(x)[0]

    def gradient(self, x: DenseVector) -> DenseVector:
        return self.value_grad(x)[1]

    def _check(self, x) -> DenseVector:
        x = np.asarray(x, dtype=np.float64)
        if x.shape != (self.dim,):
            raise DimensionMismatch(f"{self.name} expects shape ({self.dim},), got {x.shape}")
        return x


@dataclass(eq=False)
class QuadraticProblem(Problem):
    """f(x) = 0.5 x^T A x - b^T x with a stored eigen-decomposition of A."""

    a: DenseMatrix
    b: DenseVector
    eigenvalues: list[float]
    q: DenseMatrix | None = None
    name: str = "quadratic"
    kind: str = field(default="quadratic", init=False)

    def __post_init__(self):
        self.a = np.asarray(self.a, dtype=np.float64)
        self.b = np.asarray(self.b, dtype=np.float64)
        self.dim = self.b.shape[0]
        if self.a.shape != (self.dim, self.dim):
            raise DimensionMismatch(f"A is {self.a.shape} but b has length {self.dim}")
        self.optimum = solve_spd(self.a, self.b)
        self.lipschitz_L = float(max(self.eigenvalues))
        self.strong_mu = float(min(self.eigenvalues))

    @property
    def kappa(self) -> float:
        return self.lipschitz_L / self.strong_mu

    @classmethod
    def diagonal(cls, eigenvalues, b=None, name: str = "quadratic") -> QuadraticProblem:
        eig = [float(v) for v in eigenvalues]
        rhs = np.zeros(len(eig)) if b is None else b
        return cls(np.diag(eig), rhs, eig, q=np.eye(len(eig)), name=name)

    def value_grad(self, x):
        x = self._check(x)
        ax = self.a @ x
        return 0.5 * float(x @ ax) - float(self.b @ x), ax - self.b


def quadratic_eigenvalues(kappa: float, d: int) -> list[float]:
    """d eigenvalues evenly spaced on [1, kappa]."""
    return [1.0 + i * (kappa - 1.0) / (d - 1) for i in range(d)]


def make_quadratic(kappa: float, d: int = 10, seed: int | SeededRng = 0) -> QuadraticProblem:
    """Random quadratic with prescribed spectrum.

    Draw order from the stream: the d*d Gaussian matrix behind Q, then b.
    Pass a ``SeededRng`` instead of an int to keep drawing (e.g. x0) from
    the same stream afterwards.
    """
    if not kappa >= 1.0:
        raise InvalidKappa(f"kappa must be >= 1, got {kappa}")
    if d < 2:
        raise ValueError("d must be >= 2")
    rng = seed if isinstance(seed, SeededRng) else SeededRng(seed)
    q = random_orthogonal(rng, d)
    eig = quadratic_eigenvalues(kappa, d)
    a = (q * np.asarray(eig)) @ q.T
    a = 0.5 * (a + a.T)
    b = standard_normal(rng, d)
    return QuadraticProblem(a, b, eig, q=q, name=f"quad-k{kappa:g}")


def quadratic_value_grad(p: QuadraticProblem, x: DenseVector) -> tuple[float, DenseVector]:
    return p.value_grad(x)


def rosenbrock_value_grad(x: DenseVector) -> tuple[float, DenseVector]:
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (2,):
        raise DimensionMismatch(f"rosenbrock expects shape (2,), got {x.shape}")
    u, v = x
    valley = v - u * u
    f = (1.0 - u) ** 2 + 100.0 * valley**2
    return f, np.array([-2.0 * (1.0 - u) - 400.0 * u * valley, 200.0 * valley])


_BEALE_CONSTS = (1.5, 2.25, 2.625)


def beale_value_grad(x: DenseVector) -> tuple[float, DenseVector]:
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (2,):
        raise DimensionMismatch(f"beale expects shape (2,), got {x.shape}")
    u, v = x
    f = 0.0
    gu = 0.0
    gv = 0.0
    for k, c in enumerate(_BEALE_CONSTS, start=1):
        r = c - u + u * v**k
        f += r * r
        gu += 2.0 * r * (v**k - 1.0)
        gv += 2.0 * r * k * u * v ** (k - 1)
    return f, np.array([gu, gv])


class Rosenbrock(Problem):
    name = "rosenbrock"
    kind = "rosenbrock"
    dim = 2

    def __init__(self):
        self.optimum = np.array([1.0, 1.0])

    def value_grad(self, x):
        return rosenbrock_value_grad(x)


class Beale(Problem):
    name = "beale"
    kind = "beale"
    dim = 2

    def __init__(self):
        self.optimum = np.array([3.0, 0.5])

    def value_grad(self, x):
        return beale_value_grad(x)


def finite_diff_gradient(problem, x: DenseVector, h: float = 1e-6) -> DenseVector:
    """Central-difference gradient with per-coordinate step h * max(1, |x_i|).

    ``problem`` may be a :class:`Problem` or a plain callable returning f(x).
    """
    if not h > 0:
        raise ValueError("h must be positive")
    f = problem.value if isinstance(problem, Problem) else problem
    x = np.asarray(x, dtype=np.float64)
    grad = np.empty_like(x)
    for i in range(x.shape[0]):
        step = h * max(1.0, abs(x[i]))
        xp = x.copy()
        xm = x.copy()
        xp[i] += step
        xm[i] -= step
        grad[i] = (f(xp) - f(xm)) / (xp[i] - xm[i])
    return grad


def gradient_relative_error(problem: Problem, x: DenseVector, h: float = 1e-6) -> float:
    """||analytic - finite difference|| / max(1, ||analytic||)."""
    g = problem.gradient(x)
    fd = finite_diff_gradient(problem, x, h)
    return float(np.linalg.norm(g - fd) / max(1.0, np.linalg.norm(g)))
