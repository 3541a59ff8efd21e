"""Small dense linear algebra and a reproducible random stream.

Vectors and matrices are plain float64 numpy arrays. Everything here is
deterministic: the random stream is a splitmix64 counter generator, so the
same seed gives bit-identical draws on any platform.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np
import numpy.typing as npt

from .exceptions import DimensionMismatch, NotPositiveDefinite, UnsupportedSize

DenseVector = npt.NDArray[np.float64]
DenseMatrix = npt.NDArray[np.float64]

_GOLDEN_GAMMA = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)
_MASK64 = (1 << 64) - 1


def _mix64(z: npt.NDArray[np.uint64]) -> npt.NDArray[np.uint64]:
    z = (z ^ (z >> np.uint64(30))) * _MIX1
    z = (z ^ (z >> np.uint64(27))) * _MIX2
    return z ^ (z >> np.uint64(31))


def mix_seed(*parts: int) -> int:
    """Fold integers into one 64-bit seed (used to derive per-cell streams)."""
    acc = 0
    for part in parts:
        z = (acc ^ (part & _MASK64)) + 0x9E3779B97F4A7C15 & _MASK64
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9 & _MASK64
        z = (z ^ (z >> 27)) * 0x94D049BB133111EB & _MASK64
        acc = z ^ (z >> 31)
    return acc


@dataclass
class SeededRng:
    """splitmix64 counter generator.

    The i-th output (1-based) is ``mix64(seed + i * gamma)``, so a block of
    draws is computed in one vectorized pass. ``counter`` records how many
    64-bit words have been consumed.
    """

    seed: int
    counter: int = 0

    def next_uint64(self, n: int) -> npt.NDArray[np.uint64]:
        idx = np.arange(self.counter + 1, self.counter + n + 1, dtype=np.uint64)
        self.counter += n
        with np.errstate(over="ignore"):
            state = np.uint64(self.seed & _MASK64) + idx * _GOLDEN_GAMMA
            return _mix64(state)

    def uniform(self, n: int) -> DenseVector:
        """n doubles in [0, 1) built from the top 53 bits of each word."""
        return (self.next_uint64(n) >> np.uint64(11)).astype(np.float64) * 2.0**-53


def standard_normal(rng: SeededRng, n: int) -> DenseVector:
    """Draw n standard normals by Box-Muller.

    Words are consumed in pairs (u1, u2); each pair yields the cosine and
    sine variates in that order. An odd n discards the final sine variate.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    pairs = (n + 1) // 2
    u = rng.uniform(2 * pairs).reshape(pairs, 2)
    radius = np.sqrt(-2.0 * np.log(1.0 - u[:, 0]))  # 1 - u lies in (0, 1]
    theta = 2.0 * np.pi * u[:, 1]
    out = np.empty(2 * pairs)
    out[0::2] = radius * np.cos(theta)
    out[1::2] = radius * np.sin(theta)
    return out[:n]


def householder_qr(a: DenseMatrix) -> tuple[DenseMatrix, DenseMatrix]:
    """Householder QR of a square matrix, with R's diagonal made non-negative.

    Raises ``ZeroDivisionError`` when a column below the diagonal is exactly
    zero, which makes the factor non-unique.
    """
    r = np.array(a, dtype=np.float64)
    n = r.shape[0]
    if r.shape != (n, n):
        raise DimensionMismatch(f"expected a square matrix, got {r.shape}")
    reflectors = []
    for k in range(n - 1):
        x = r[k:, k]
        normx = np.linalg.norm(x)
        if normx == 0.0:
            raise ZeroDivisionError(f"zero column at index {k}")
        v = x.copy()
        v[0] += math.copysign(normx, x[0])
        v /= np.linalg.norm(v)
        r[k:, k:] -= 2.0 * np.outer(v, v @ r[k:, k:])
        reflectors.append(v)
    if r[n - 1, n - 1] == 0.0:
        raise ZeroDivisionError(f"zero column at index {n - 1}")

    q = np.eye(n)
    for k in range(len(reflectors) - 1, -1, -1):
        v = reflectors[k]
        q[k:, :] -= 2.0 * np.outer(v, v @ q[k:, :])

    signs = np.where(np.diag(r) < 0.0, -1.0, 1.0)
    q *= signs[np.newaxis, :]
    r *= signs[:, np.newaxis]
    return q, np.triu(r)


def random_orthogonal(rng: SeededRng, d: int) -> DenseMatrix:
    """Q from the QR of a d x d standard Gaussian matrix (row-major fill)."""
    if d < 1:
        raise ValueError("d must be >= 1")
    while True:
        gauss = standard_normal(rng, d * d).reshape(d, d)
        try:
            q, _ = householder_qr(gauss)
        except ZeroDivisionError:
            continue
        return q


def cholesky(a: DenseMatrix) -> DenseMatrix:
    """Lower-triangular L with L L^T = a."""
    a = np.asarray(a, dtype=np.float64)
    n = a.shape[0]
    if a.shape != (n, n):
        raise DimensionMismatch(f"expected a square matrix, got {a.shape}")
    low = np.zeros_like(a)
    for j in range(n):
        pivot = a[j, j] - low[j, :j] @ low[j, :j]
        if not pivot > 0.0:
            raise NotPositiveDefinite(f"pivot {j} is {pivot!r}")
        low[j, j] = math.sqrt(pivot)
        low[j + 1:, j] = (a[j + 1:, j] - low[j + 1:, :j] @ low[j, :j]) / low[j, j]
    return low


def solve_spd(a: DenseMatrix, b: DenseVector) -> DenseVector:
    """Solve a x = b for symmetric positive definite a via Cholesky."""
    b = np.asarray(b, dtype=np.float64)
    if b.shape != (np.shape(a)[0],):
        raise DimensionMismatch(f"matrix {np.shape(a)} vs rhs {b.shape}")
    low = cholesky(a)
    n = b.shape[0]
    y = np.empty(n)
    for i in range(n):
        y[i] = (b[i] - low[i, :i] @ y[:i]) / low[i, i]
    x = np.empty(n)
    for i in range(n - 1, -1, -1):
        x[i] = (y[i] - low[i + 1:, i] @ x[i + 1:]) / low[i, i]
    return x


def _quadratic_roots(b: float, c: float) -> list[complex]:
    # z^2 + b z + c
    disc = b * b - 4.0 * c
    if disc >= 0.0:
        s = math.sqrt(disc)
        big = -0.5 * (b + math.copysign(s, b))
        if big == 0.0:
            return [0j, 0j]
        return [complex(big), complex(c / big)]
    re = -0.5 * b
    im = 0.5 * math.sqrt(-disc)
    return [complex(re, im), complex(re, -im)]


def _cubic_roots(b: float, c: float, d: float) -> list[complex]:
    # z^3 + b z^2 + c z + d
    shift = b / 3.0
    p = c - b * b / 3.0
    q = 2.0 * b**3 / 27.0 - b * c / 3.0 + d
    disc = (q / 2.0) ** 2 + (p / 3.0) ** 3
    if p < 0.0 and disc < 0.0:
        m = 2.0 * math.sqrt(-p / 3.0)
        arg = max(-1.0, min(1.0, 3.0 * q / (p * m)))
        phi = math.acos(arg) / 3.0
        roots = [complex(m * math.cos(phi - 2.0 * math.pi * k / 3.0) - shift) for k in range(3)]
    else:
        s = math.sqrt(max(disc, 0.0))
        u = float(np.cbrt(-q / 2.0 + s))
        v = float(np.cbrt(-q / 2.0 - s))
        real = u + v - shift
        # deflate by the real root
        roots = [complex(real)] + _quadratic_roots(b + real, c + real * (b + real))

    def poly(z: complex) -> tuple[complex, complex]:
        return ((z + b) * z + c) * z + d, (3.0 * z + 2.0 * b) * z + c

    polished = []
    for z in roots:
        val, der = poly(z)
        for _ in range(3):
            if der == 0 or val == 0:
                break
            trial = z - val / der
            tval, tder = poly(trial)
            if not cmath.isfinite(tval) or abs(tval) >= abs(val):
                break
            z, val, der = trial, tval, tder
        polished.append(z)
    return polished


def eigenvalues_small(m: DenseMatrix) -> list[complex]:
    """Closed-form eigenvalues of a 1x1, 2x2 or 3x3 real matrix."""
    m = np.asarray(m, dtype=np.float64)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got {m.shape}")
    n = m.shape[0]
    if n == 1:
        return [complex(m[0, 0])]
    if n == 2:
        trace = m[0, 0] + m[1, 1]
        det = m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]
        return _quadratic_roots(-trace, det)
    if n == 3:
        trace = float(np.trace(m))
        minors = (
            m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]
            + m[0, 0] * m[2, 2] - m[0, 2] * m[2, 0]
            + m[1, 1] * m[2, 2] - m[1, 2] * m[2, 1]
        )
        det = (
            m[0, 0] * (m[1, 1] * m[2, 2] - m[1, 2] * m[2, 1])
            - m[0, 1] * (m[1, 0] * m[2, 2] - m[1, 2] * m[2, 0])
            + m[0, 2] * (m[1, 0] * m[2, 1] - m[1, 1] * m[2, 0])
        )
        return _cubic_roots(-trace, float(minors), -float(det))
    raise UnsupportedSize(f"closed-form eigenvalues only up to 3x3, got {n}x{n}")


def small_spectral_radius(m: DenseMatrix) -> float:
    """Largest eigenvalue modulus of a matrix of size at most 3x3."""
    m = np.asarray(m, dtype=np.float64)
    if m.shape == (2, 2):
        trace = m[0, 0] + m[1, 1]
        det = m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]
        if trace * trace < 4.0 * det:
            # complex pair: both roots have modulus sqrt(det)
            return math.sqrt(det)
    return max(abs(z) for z in eigenvalues_small(m))
