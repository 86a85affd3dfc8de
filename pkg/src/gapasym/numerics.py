"""Quadrature, log-space determinants, finite differences and extrapolation."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import NotPositiveDefinite, NumericalFailure

__all__ = [
    "LogValue",
    "Quadrature",
    "central_difference",
    "estimate_order",
    "gauss_legendre",
    "log_det_cholesky",
    "log_det_lu",
    "loglog_slope",
    "richardson_extrapolate",
]

NEWTON_TOL = 1e-15
NEWTON_MAX_ITER = 100
PIVOT_FLOOR = 1e-300


@dataclass(frozen=True)
class LogValue:
    """A real number stored as ``sign * exp(log_abs)``.

    ``log_abs`` is meaningless (conventionally ``-inf``) when ``sign == 0``.
    """

    sign: int
    log_abs: float

    def __post_init__(self):
        if self.sign not in (-1, 0, 1):
            raise ValueError(f"sign must be -1, 0 or +1, got {self.sign!r}")
        if self.sign == 0 and self.log_abs != -math.inf:
            object.__setattr__(self, "log_abs", -math.inf)

    @classmethod
    def from_float(cls, x: float) -> "LogValue":
        if x == 0:
            return cls(0, -math.inf)
        if not math.isfinite(x):
            raise ValueError(f"cannot represent {x!r} as a LogValue")
        return cls(1 if x > 0 else -1, math.log(abs(x)))

    @classmethod
    def zero(cls) -> "LogValue":
        return cls(0, -math.inf)

    @classmethod
    def product(cls, factors: Iterable["LogValue"]) -> "LogValue":
        sign = 1
        logs = []
        for f in factors:
            sign *= f.sign
            if sign == 0:
                return cls.zero()
            logs.append(f.log_abs)
        return cls(sign, math.fsum(logs))

    def __float__(self) -> float:
        if self.sign == 0:
            return 0.0
        return self.sign * math.exp(self.log_abs)

    def __mul__(self, other: "LogValue") -> "LogValue":
        if not isinstance(other, LogValue):
            return NotImplemented
        sign = self.sign * other.sign
        if sign == 0:
            return LogValue.zero()
        return LogValue(sign, self.log_abs + other.log_abs)

    def __truediv__(self, other: "LogValue") -> "LogValue":
        if not isinstance(other, LogValue):
            return NotImplemented
        if other.sign == 0:
            raise ZeroDivisionError("division by a zero LogValue")
        if self.sign == 0:
            return LogValue.zero()
        return LogValue(self.sign * other.sign, self.log_abs - other.log_abs)

    def __pow__(self, k: int) -> "LogValue":
        if not isinstance(k, int):
            return NotImplemented
        if self.sign == 0:
            if k <= 0:
                raise ZeroDivisionError("non-positive power of a zero LogValue")
            return LogValue.zero()
        sign = self.sign if k % 2 else 1
        return LogValue(sign, k * self.log_abs)


@dataclass(frozen=True, eq=False)
class Quadrature:
    lower: float
    upper: float
    nodes: np.ndarray
    weights: np.ndarray

    def __len__(self) -> int:
        return len(self.nodes)

    def integrate(self, values: np.ndarray) -> float:
        return float(np.sum(self.weights * values))


@lru_cache(maxsize=64)
def _legendre_rule(m: int) -> tuple[np.ndarray, np.ndarray]:
    """Reference m-point rule on (-1, 1), nodes increasing."""
    if m == 1:
        return np.array([0.0]), np.array([2.0])
    half = (m + 1) // 2
    i = np.arange(1, half + 1)
    x = np.cos(np.pi * (i - 0.25) / (m + 0.5))
    for _ in range(NEWTON_MAX_ITER):
        p_prev = np.ones_like(x)
        p = x.copy()
        for k in range(2, m + 1):
            p_prev, p = p, ((2 * k - 1) * x * p - (k - 1) * p_prev) / k
        dp = m * (x * p - p_prev) / (x * x - 1.0)
        dx = p / dp
        x = x - dx
        if np.max(np.abs(dx)) <= NEWTON_TOL:
            break
    else:
        raise NumericalFailure(f"Gauss-Legendre nodes for m={m} did not converge")
    # derivative at the final nodes
    p_prev = np.ones_like(x)
    p = x.copy()
    for k in range(2, m + 1):
        p_prev, p = p, ((2 * k - 1) * x * p - (k - 1) * p_prev) / k
    dp = m * (x * p - p_prev) / (x * x - 1.0)
    w = 2.0 / ((1.0 - x * x) * dp * dp)
    if m % 2:
        x[-1] = 0.0
        nodes = np.concatenate([-x, x[-2::-1]])
        weights = np.concatenate([w, w[-2::-1]])
    else:
        nodes = np.concatenate([-x, x[::-1]])
        weights = np.concatenate([w, w[::-1]])
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return nodes, weights


def gauss_legendre(m: int, lower: float, upper: float) -> Quadrature:
    """m-point Gauss-Legendre rule on (lower, upper).

    Nodes are Newton-refined roots of the Legendre recurrence, started from
    the Chebyshev-angle guesses.
    """
    if int(m) != m or m < 1:
        raise ValueError(f"m must be a positive integer, got {m!r}")
    if not (math.isfinite(lower) and math.isfinite(upper)) or not lower < upper:
        raise ValueError(f"need finite lower < upper, got ({lower!r}, {upper!r})")
    t, w = _legendre_rule(int(m))
    half = 0.5 * (upper - lower)
    mid = 0.5 * (upper + lower)
    nodes = mid + half * t
    weights = half * w
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return Quadrature(float(lower), float(upper), nodes, weights)


def _as_square(M) -> np.ndarray:
    A = np.asarray(M, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1] or A.shape[0] == 0:
        raise ValueError(f"expected a non-empty square matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise ValueError("matrix has non-finite entries")
    return A


def log_det_cholesky(M) -> LogValue:
    """Log-determinant of a symmetric positive definite matrix.

    The factorization runs in extended precision (``np.longdouble``) and the
    log of each pivot is accumulated separately, so determinants far outside
    the float range are fine. Raises :class:`NotPositiveDefinite` with the
    failing pivot index.
    """
    A = _as_square(M)
    if not np.array_equal(A, A.T):
        raise ValueError("matrix is not symmetric")
    A = A.astype(np.longdouble)
    n = A.shape[0]
    logs = np.empty(n, dtype=np.longdouble)
    for k in range(n):
        pivot = A[k, k]
        if not pivot > 0 or pivot < PIVOT_FLOOR:
            raise NotPositiveDefinite(k, float(pivot))
        logs[k] = np.log(pivot)
        if k + 1 < n:
            col = A[k + 1 :, k]
            A[k + 1 :, k + 1 :] -= np.outer(col, col / pivot)
    return LogValue(1, float(np.sum(logs)))


def log_det_lu(M) -> LogValue:
    """Signed log-determinant by LU with partial pivoting."""
    A = _as_square(M).copy()
    n = A.shape[0]
    sign = 1
    log_abs = 0.0
    for k in range(n):
        p = k + int(np.argmax(np.abs(A[k:, k])))
        pivot = A[p, k]
        if pivot == 0.0:
            return LogValue.zero()
        if p != k:
            A[[k, p]] = A[[p, k]]
            sign = -sign
        if pivot < 0:
            sign = -sign
        log_abs += math.log(abs(pivot))
        if k + 1 < n:
            factors = A[k + 1 :, k] / pivot
            A[k + 1 :, k + 1 :] -= np.outer(factors, A[k, k + 1 :])
    return LogValue(sign, log_abs)


def central_difference(f: Callable[[float], float], x: float, h: float) -> float:
    if not h > 0:
        raise ValueError(f"step must be positive, got {h!r}")
    hi = f(x + h)
    lo = f(x - h)
    if not (math.isfinite(hi) and math.isfinite(lo)):
        raise NumericalFailure(f"non-finite evaluation near x={x!r}")
    return (hi - lo) / (2.0 * h)


def richardson_extrapolate(
    pairs: Sequence[tuple[float, float]], order: float, step: float = 1.0
) -> float:
    """Estimate the h -> 0 limit of values with error ~ c0 h^p + c1 h^(p+step) + ...

    With k pairs the k - 1 leading error terms are eliminated exactly.
    """
    if len(pairs) < 2:
        raise ValueError("Richardson extrapolation needs at least two (h, value) pairs")
    hs = np.array([float(h) for h, _ in pairs])
    vs = np.array([float(v) for _, v in pairs])
    if np.any(hs <= 0) or not np.all(np.isfinite(hs)):
        raise ValueError("steps must be positive and finite")
    if len(np.unique(hs)) != len(hs):
        raise ValueError("steps must be distinct")
    if not order > 0:
        raise ValueError(f"order must be positive, got {order!r}")
    k = len(pairs)
    # rescale steps so the system is well scaled
    hs = hs / hs.max()
    V = np.ones((k, k))
    for j in range(1, k):
        V[:, j] = hs ** (order + (j - 1) * step)
    return float(np.linalg.solve(V, vs)[0])


def estimate_order(hs: Sequence[float], values: Sequence[float]) -> float:
    """Convergence order p fitted to the last three (h, value) samples.

    Solves (v0 - v1)/(v1 - v2) = (h0^p - h1^p)/(h1^p - h2^p) for p by
    bisection on [0.05, 20]. Raises NumericalFailure when the samples do not
    look like a power-law approach.
    """
    if len(hs) < 3:
        raise ValueError("need at least three samples to fit an order")
    h0, h1, h2 = (float(h) for h in hs[-3:])
    v0, v1, v2 = (float(v) for v in values[-3:])
    d1, d2 = v0 - v1, v1 - v2
    if d2 == 0 or d1 / d2 <= 0:
        raise NumericalFailure("successive differences do not decay monotonically")
    target = math.log(abs(d1 / d2))

    def g(p):
        return math.log(abs((h0**p - h1**p) / (h1**p - h2**p))) - target

    lo, hi = 0.05, 20.0
    glo, ghi = g(lo), g(hi)
    if glo * ghi > 0:
        raise NumericalFailure("could not bracket the convergence order")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        gm = g(mid)
        if glo * gm <= 0:
            hi = mid
        else:
            lo, glo = mid, gm
        if hi - lo < 1e-12:
            break
    return 0.5 * (lo + hi)


def loglog_slope(x: Sequence[float], y: Sequence[float]) -> float:
    """Least-squares slope of log|y| against log x."""
    lx = np.log(np.asarray(x, dtype=float))
    ly = np.log(np.abs(np.asarray(y, dtype=float)))
    return float(np.polyfit(lx, ly, 1)[0])
