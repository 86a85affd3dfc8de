"""Sine and Airy kernels and their Fredholm determinants by Nystrom discretization.

For a kernel K on an interval and a Gauss-Legendre rule (x_i, w_i) the
determinant det(I - K) is approximated by

    det(delta_ij - sqrt(w_i) K(x_i, x_j) sqrt(w_j)),

which converges geometrically in the number of nodes for analytic kernels.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import AiryDomainError, NumericalFailure
from .numerics import gauss_legendre, log_det_lu
from .specfun import AIRY_RANGE, airy

__all__ = [
    "DEFAULT_AIRY_CUTOFF",
    "GapResult",
    "NystromConfig",
    "airy_kernel",
    "airy_tail_trace",
    "default_m_airy",
    "default_m_sine",
    "fredholm_det_airy",
    "fredholm_det_sine",
    "sine_kernel",
]

DEFAULT_AIRY_CUTOFF = 14.0
SINE_DIAGONAL_RADIUS = 1e-8
AIRY_DIAGONAL_RADIUS = 1e-6


@dataclass(frozen=True)
class NystromConfig:
    m: int
    airy_cutoff: float | None = None


@dataclass(frozen=True)
class GapResult:
    s: float
    log_det: float
    config: NystromConfig
    error_estimate: float


def _even_ceil(x: float) -> int:
    m = math.ceil(x)
    return m + (m % 2)


def default_m_sine(s: float) -> int:
    # the 16-point floor is the resolution minimum fredholm_det_sine enforces
    return max(16, _even_ceil(10 + 6 * s))


def default_m_airy(s: float, cutoff: float = DEFAULT_AIRY_CUTOFF) -> int:
    # the sine rule per half-length of the truncated interval (-s, cutoff)
    return _even_ceil(10 + 3 * (s + cutoff))


def sine_kernel(x: float, y: float) -> float:
    d = x - y
    if abs(d) < SINE_DIAGONAL_RADIUS:
        return 1.0 / math.pi - d * d / (6.0 * math.pi)
    return math.sin(d) / (math.pi * d)


def _sine_kernel_matrix(x: np.ndarray) -> np.ndarray:
    d = x[:, None] - x[None, :]
    near = np.abs(d) < SINE_DIAGONAL_RADIUS
    safe = np.where(near, 1.0, d)
    return np.where(near, 1.0 / np.pi - d * d / (6.0 * np.pi), np.sin(safe) / (np.pi * safe))


def _airy_diagonal(ai: float, aip: float, x: float) -> float:
    return aip * aip - x * ai * ai


def airy_kernel(x: float, y: float) -> float:
    """(Ai(x)Ai'(y) - Ai(y)Ai'(x)) / (x - y).

    Near the diagonal the value at the midpoint, Ai'(m)^2 - m Ai(m)^2, is
    used; it is exact to O((x - y)^2) and keeps the kernel symmetric.
    """
    d = x - y
    if abs(d) < AIRY_DIAGONAL_RADIUS:
        mid = 0.5 * (x + y)
        return _airy_diagonal(*airy(mid), mid)
    ax, apx = airy(x)
    ay, apy = airy(y)
    return (ax * apy - ay * apx) / d


def _airy_kernel_matrix(x: np.ndarray) -> np.ndarray:
    vals = np.array([airy(xi) for xi in x])
    ai, aip = vals[:, 0], vals[:, 1]
    d = x[:, None] - x[None, :]
    near = np.abs(d) < AIRY_DIAGONAL_RADIUS
    K = (ai[:, None] * aip[None, :] - ai[None, :] * aip[:, None]) / np.where(near, 1.0, d)
    if np.any(near):
        for i, j in zip(*np.nonzero(near)):
            K[i, j] = airy_kernel(float(x[i]), float(x[j]))
    return K


def airy_tail_trace(t: float) -> float:
    """Integral of K(x, x) over (t, inf): (2t^2 Ai^2 - 2t Ai'^2 - Ai Ai') / 3 at t."""
    ai, aip = airy(t)
    return (2 * t * t * ai * ai - 2 * t * aip * aip - ai * aip) / 3.0


def _nystrom_log_det(kernel_matrix, m: int, lower: float, upper: float) -> float:
    rule = gauss_legendre(m, lower, upper)
    root_w = np.sqrt(rule.weights)
    A = np.eye(m) - root_w[:, None] * kernel_matrix(rule.nodes) * root_w[None, :]
    det = log_det_lu(A)
    if det.sign != 1:
        raise NumericalFailure(
            f"discretized I - K on ({lower}, {upper}) with m={m} has determinant sign {det.sign}"
        )
    return det.log_abs


def fredholm_det_sine(s: float, m: int | None = None) -> GapResult:
    """ln det(I - K_sine) on L^2(0, 2s)."""
    if not s > 0 or not math.isfinite(s):
        raise ValueError(f"gap half-length must be positive, got {s!r}")
    if m is None:
        m = default_m_sine(s)
    if m < max(16, 4 * s):
        raise ValueError(f"m={m} too small to resolve the sine kernel at s={s}; need m >= max(16, 4s)")
    upper = 2.0 * s
    value = _nystrom_log_det(_sine_kernel_matrix, m, 0.0, upper)
    coarse = _nystrom_log_det(_sine_kernel_matrix, math.ceil(m / 2), 0.0, upper)
    return GapResult(s, value, NystromConfig(m), abs(value - coarse))


def fredholm_det_airy(
    s: float, m: int | None = None, cutoff: float = DEFAULT_AIRY_CUTOFF
) -> GapResult:
    """ln det(I - K_Airy) on L^2(-s, inf), truncated to (-s, cutoff)."""
    if not s >= 0 or not math.isfinite(s):
        raise ValueError(f"gap edge parameter must be nonnegative, got {s!r}")
    if not cutoff >= 6:
        raise ValueError(f"Airy cutoff must be at least 6, got {cutoff!r}")
    lo, hi = AIRY_RANGE
    if cutoff > hi or -s < lo:
        raise AiryDomainError(
            f"interval (-{s}, {cutoff}) leaves the validated Airy range {AIRY_RANGE}"
        )
    # the truncation is not rejected on a tail threshold: its size goes into
    # error_estimate so callers comparing cutoffs can see it
    if m is None:
        m = default_m_airy(s, cutoff)
    if m < 4:
        raise ValueError(f"m must be at least 4, got {m}")
    value = _nystrom_log_det(_airy_kernel_matrix, m, -s, cutoff)
    coarse = _nystrom_log_det(_airy_kernel_matrix, math.ceil(m / 2), -s, cutoff)
    tail = abs(airy_tail_trace(cutoff))
    return GapResult(s, value, NystromConfig(m, cutoff), abs(value - coarse) + tail)
