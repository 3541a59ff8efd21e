"""Per-eigenmode stability analysis of the optimizers on quadratics.

On f(x) = 0.5 x^T A x - b^T x every method decouples along the eigenvectors
of A. Along a mode with curvature lam the error e = x - x* obeys a small
linear recurrence; its companion matrix (the "mode matrix") has spectral
radius < 1 iff that mode contracts. Derivations, with e_t the error and
v_0 = 0 so that eta v_t = e_{t-1} - e_t:

    SGD       e' = (1 - eta lam) e
    Momentum  e' = (1 + beta - eta lam) e - beta e_prev
    NAG       e' = (1 + beta)(1 - eta lam) e - beta (1 - eta lam) e_prev
    HB-SGE    state (e, e_prev, m), fixed alpha:
              m' = beta m + (1 - beta) lam ((1 + alpha) e - alpha e_prev)
              e' = e - eta m'

For HB-SGE the exact radius is reported next to the scalar formula
1 - eta lam (1 + alpha eta lam) + beta and the bound alpha < 2 / (eta L) - 1.
The two views disagree: at kappa = 50, eta = 0.05, beta = 0.9, alpha = 1.2
the formula gives |-8.1| while the exact radius is about 0.946 and the
method converges. Both are emitted; nothing here reconciles them.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .exceptions import UnknownMethod
from .numerics import DenseMatrix, small_spectral_radius
from .optimizers import Method, OptimizerConfig
from .problems import QuadraticProblem

MARGIN = 1e-3


class Prediction(str, Enum):
    CONVERGE = "Converge"
    DIVERGE = "Diverge"
    MARGINAL = "Marginal"


def classify(rho: float, margin: float = MARGIN) -> Prediction:
    if rho < 1.0 - margin:
        return Prediction.CONVERGE
    if rho > 1.0 + margin:
        return Prediction.DIVERGE
    return Prediction.MARGINAL


def mode_matrix(method, lambda_i: float, eta: float, beta: float = 0.0, alpha: float = 0.0) -> DenseMatrix:
    """One-step update matrix for a single eigenmode with curvature ``lambda_i``."""
    if not lambda_i > 0:
        raise ValueError("lambda_i must be positive")
    try:
        method = Method(method)
    except ValueError:
        raise UnknownMethod(f"no mode matrix for {method!r}") from None
    lam = lambda_i
    if method is Method.SGD:
        return np.array([[1.0 - eta * lam]])
    if method is Method.MOMENTUM:
        return np.array([[1.0 + beta - eta * lam, -beta],
                         [1.0, 0.0]])
    if method is Method.NAG:
        shrink = 1.0 - eta * lam
        return np.array([[(1.0 + beta) * shrink, -beta * shrink],
                         [1.0, 0.0]])
    if method is Method.HBSGE:
        w = (1.0 - beta) * lam
        m_row = [w * (1.0 + alpha), -w * alpha, beta]
        return np.array([
            [1.0 - eta * m_row[0], -eta * m_row[1], -eta * beta],
            [1.0, 0.0, 0.0],
            m_row,
        ])
    # Adam is not linear in the error, so it has no mode matrix.
    raise UnknownMethod(f"no mode matrix for {method.value!r}")


def hbsge_closed_form_eigen(lambda_i: float, eta: float, beta: float, alpha: float) -> float:
    """Scalar HB-SGE eigenvalue formula 1 - eta lam (1 + alpha eta lam) + beta."""
    return 1.0 - eta * lambda_i * (1.0 + alpha * eta * lambda_i) + beta


def theorem_alpha_bound(eta: float, L: float) -> float:
    """Extrapolation bound 2 / (eta L) - 1 from the stability theorem."""
    if not (eta > 0 and L > 0):
        raise ValueError("eta and L must be positive")
    return 2.0 / (eta * L) - 1.0


@dataclass
class StabilityReport:
    method: str
    per_mode: list[tuple[float, float]]
    max_rho: float
    predicted: Prediction
    alpha: float | None = None
    closed_form_hbsge: list[float] | None = None
    alpha_bound: float | None = None
    # HB-SGE only: radius once alpha has decayed to zero
    max_rho_alpha0: float | None = None
    notes: list[str] = field(default_factory=list)


def predict(problem: QuadraticProblem | list[float], opt: OptimizerConfig,
            alpha_fixed: float | None = None) -> StabilityReport:
    """Spectral-radius prediction for ``opt`` on a quadratic's spectrum.

    ``problem`` may also be a bare list of eigenvalues. For HB-SGE the
    extrapolation coefficient is frozen at ``alpha_fixed`` (default
    ``opt.alpha_max``, the t = 0 worst case); the alpha = 0 endpoint is
    reported in ``max_rho_alpha0``.
    """
    eigs = list(problem.eigenvalues) if isinstance(problem, QuadraticProblem) else list(problem)
    is_hb = opt.method is Method.HBSGE
    alpha = (opt.alpha_max if alpha_fixed is None else alpha_fixed) if is_hb else 0.0

    per_mode = [
        (lam, small_spectral_radius(mode_matrix(opt.method, lam, opt.eta, opt.beta, alpha)))
        for lam in eigs
    ]
    max_rho = max(rho for _, rho in per_mode)
    report = StabilityReport(opt.display_name, per_mode, max_rho, classify(max_rho))
    if is_hb:
        report.alpha = alpha
        report.closed_form_hbsge = [hbsge_closed_form_eigen(lam, opt.eta, opt.beta, alpha) for lam in eigs]
        report.alpha_bound = theorem_alpha_bound(opt.eta, max(eigs))
        report.max_rho_alpha0 = max(
            small_spectral_radius(mode_matrix(Method.HBSGE, lam, opt.eta, opt.beta, 0.0)) for lam in eigs
        )
        closed_max = max(abs(v) for v in report.closed_form_hbsge)
        if classify(closed_max) is not report.predicted:
            report.notes.append(
                f"closed-form max |eigen| = {closed_max:.6g} disagrees with exact radius {max_rho:.6g}"
            )
        if alpha >= report.alpha_bound:
            report.notes.append(f"alpha = {alpha:g} violates the bound {report.alpha_bound:.6g}")
    return report


STABILITY_HEADER = ("method", "lambda_i", "rho_exact", "rho_closed_form", "alpha_bound", "predicted")


def report_rows(report: StabilityReport) -> list[tuple]:
    """One row per mode, in the column order of ``STABILITY_HEADER``.

    ``predicted`` is per mode; the report-level verdict is the worst mode.
    """
    rows = []
    for i, (lam, rho) in enumerate(report.per_mode):
        closed = None if report.closed_form_hbsge is None else report.closed_form_hbsge[i]
        rows.append((report.method, lam, rho, None if closed is None else abs(closed), report.alpha_bound, classify(rho).value))
    return rows
