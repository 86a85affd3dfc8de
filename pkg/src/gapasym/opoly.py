"""Orthogonal polynomials for the arc symbol on the unit circle and for the
truncated exponential weight on (0, alpha).

Circle: the symbol is the indicator of the arc alpha < theta < 2pi - alpha,
normalized by 1/(2pi). Its Toeplitz moment matrix loses positive
definiteness in double precision long before the orders we need (pivots
shrink like cos(alpha/2)^(2k)), so the orthonormal system is built by
Arnoldi on multiplication by z over a Gauss-Legendre discretization of the
arc, with full reorthogonalization. The symbol is even, so all coefficients
are real and only the upper half of the arc is sampled.

Half-line: weight exp(-4 n x) on (0, alpha), handled by the discretized
Stieltjes procedure with a doubled-grid consistency check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConditioningError
from .numerics import gauss_legendre

__all__ = [
    "CircleOPSystem",
    "HalfLineOPSystem",
    "TruncatedExpWeight",
    "build_circle_system",
    "build_halfline_system",
    "circle_quadrature_size",
    "fourier_coeff_arc",
]

# Arnoldi subdiagonal below this means the next polynomial is numerically
# indistinguishable from zero on the arc
ARNOLDI_FLOOR = 1e-14
STIELTJES_GRID_TOL = 1e-9


def _check_alpha_arc(alpha: float) -> None:
    if not (0.0 < alpha < math.pi):
        raise ValueError(f"arc parameter must lie in (0, pi), got {alpha!r}")


def _check_order(n) -> int:
    if int(n) != n or n < 1:
        raise ValueError(f"order must be a positive integer, got {n!r}")
    return int(n)


def fourier_coeff_arc(k: int, alpha: float) -> float:
    """k-th Fourier coefficient of the arc indicator symbol."""
    _check_alpha_arc(alpha)
    k = abs(int(k))
    if k == 0:
        return 1.0 - alpha / math.pi
    return -math.sin(k * alpha) / (math.pi * k)


def circle_quadrature_size(n: int, alpha: float) -> int:
    """Gauss-Legendre points on the half arc (alpha, pi) for orders up to n.

    The integrands are trigonometric polynomials of degree <= 2n on an
    interval of length pi - alpha; the count tracks the number of
    oscillations plus a margin that is generous at small sizes.
    """
    span = (n + 1) * (math.pi - alpha)
    return int(math.ceil((span + 10.0 * span ** (1.0 / 3.0) + 40.0) / 2.0)) + 16


@dataclass(frozen=True, eq=False)
class CircleOPSystem:
    """phi_0 .. phi_n, orthonormal with respect to the arc symbol.

    ``hessenberg[j, k]`` holds the coefficients of z*phi_k in the basis
    phi_0 .. phi_{k+1}; it is real because the symbol is even.
    ``log_norms[k]`` is ln ||Phi_k||^2 of the monic polynomial.
    """

    alpha: float
    order: int
    hessenberg: np.ndarray
    log_norms: np.ndarray
    phi_at_edge: complex
    dphi_at_edge: complex

    @property
    def log_chi(self) -> np.ndarray:
        return -0.5 * self.log_norms

    @property
    def chi(self) -> np.ndarray:
        return np.exp(self.log_chi)

    def log_det(self, k: int | None = None) -> float:
        """ln D_k = sum of ln ||Phi_j||^2 over j < k (k defaults to the order)."""
        k = self.order if k is None else k
        if not 1 <= k <= self.order + 1:
            raise ValueError(f"determinant order must be in [1, {self.order + 1}], got {k}")
        return math.fsum(self.log_norms[:k])

    def _mu0(self) -> float:
        return 1.0 - self.alpha / math.pi

    def evaluate(self, z: complex) -> tuple[np.ndarray, np.ndarray]:
        """Values and z-derivatives of phi_0 .. phi_n at z."""
        H = self.hessenberg
        n = self.order
        p = np.zeros(n + 1, dtype=complex)
        dp = np.zeros(n + 1, dtype=complex)
        p[0] = 1.0 / math.sqrt(self._mu0())
        for k in range(n):
            col = H[: k + 1, k]
            p[k + 1] = (z * p[k] - col @ p[: k + 1]) / H[k + 1, k]
            dp[k + 1] = (p[k] + z * dp[k] - col @ dp[: k + 1]) / H[k + 1, k]
        return p, dp

    def coefficients(self, k: int) -> np.ndarray:
        """Monomial coefficients of phi_k, constant term first (real)."""
        if not 0 <= k <= self.order:
            raise ValueError(f"polynomial index must be in [0, {self.order}], got {k}")
        H = self.hessenberg
        C = np.zeros((k + 1, k + 1))
        C[0, 0] = 1.0 / math.sqrt(self._mu0())
        for j in range(k):
            shifted = np.zeros(k + 1)
            shifted[1:] = C[j, :-1]
            C[j + 1] = (shifted - H[: j + 1, j] @ C[: j + 1]) / H[j + 1, j]
        return C[k]


def build_circle_system(alpha: float, n: int, m: int | None = None) -> CircleOPSystem:
    """Orthonormal polynomials phi_0 .. phi_n for the arc symbol."""
    _check_alpha_arc(alpha)
    n = _check_order(n)
    if m is None:
        m = circle_quadrature_size(n, alpha)
    rule = gauss_legendre(m, alpha, math.pi)
    z = np.exp(1j * rule.nodes)
    # (1/2pi) over the full arc equals (1/pi) Re(...) over the upper half
    root_w = np.sqrt(rule.weights / math.pi)
    mu0 = float(np.sum(rule.weights)) / math.pi

    size = n + 1
    Q = np.zeros((m, size), dtype=complex)
    H = np.zeros((size, size))
    log_norms = np.empty(size)
    Q[:, 0] = root_w / math.sqrt(mu0)
    log_norms[0] = math.log(mu0)
    for k in range(n):
        v = z * Q[:, k]
        basis = Q[:, : k + 1]
        for _ in range(2):
            c = (basis.conj().T @ v).real
            v = v - basis @ c
            H[: k + 1, k] += c
        r = math.sqrt(float(np.sum(v.real**2 + v.imag**2)))
        if not r > ARNOLDI_FLOOR:
            raise ConditioningError(
                f"arc system with alpha={alpha} degenerates at degree {k + 1} (norm ratio {r:.3g})",
                largest_usable=k,
            )
        H[k + 1, k] = r
        Q[:, k + 1] = v / r
        log_norms[k + 1] = log_norms[k] + 2.0 * math.log(r)

    H.setflags(write=False)
    log_norms.setflags(write=False)
    proto = CircleOPSystem(alpha, n, H, log_norms, 0j, 0j)
    p, dp = proto.evaluate(complex(math.cos(alpha), math.sin(alpha)))
    return CircleOPSystem(alpha, n, H, log_norms, complex(p[n]), complex(dp[n]))


@dataclass(frozen=True)
class TruncatedExpWeight:
    """exp(-4 n x) on (0, alpha), zero elsewhere."""

    alpha: float
    n: int

    def __post_init__(self):
        if not (self.alpha > 0 and math.isfinite(self.alpha)):
            raise ValueError(f"weight endpoint must be positive and finite, got {self.alpha!r}")
        _check_order(self.n)

    @property
    def rate(self) -> float:
        return 4.0 * self.n

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        return np.where((x > 0) & (x < self.alpha), np.exp(-self.rate * x), 0.0)


@dataclass(frozen=True, eq=False)
class HalfLineOPSystem:
    """p_0 .. p_n orthonormal for a truncated exponential weight.

    Three-term recurrence b_{k+1} p_{k+1} = (x - a_k) p_k - b_k p_{k-1};
    ``diag[k] = a_k`` for k < n and ``offdiag[k] = b_{k+1}`` for k < n, so
    kappa_k / kappa_{k+1} = offdiag[k].
    """

    weight: TruncatedExpWeight
    order: int
    log_mass: float
    diag: np.ndarray
    offdiag: np.ndarray
    p_at_edge: tuple[float, float]
    dp_at_edge: tuple[float, float]

    @property
    def log_kappa(self) -> np.ndarray:
        logs = np.concatenate([[-0.5 * self.log_mass], -np.log(self.offdiag)])
        return np.cumsum(logs)

    @property
    def kappa(self) -> np.ndarray:
        return np.exp(self.log_kappa)

    def log_det(self, k: int | None = None) -> float:
        """ln of the k x k Hankel determinant, -2 sum_{j<k} ln kappa_j."""
        k = self.order if k is None else k
        if not 1 <= k <= self.order + 1:
            raise ValueError(f"determinant order must be in [1, {self.order + 1}], got {k}")
        return -2.0 * math.fsum(self.log_kappa[:k])

    def evaluate(self, x: float) -> tuple[np.ndarray, np.ndarray]:
        """Values and derivatives of p_0 .. p_n at x."""
        n = self.order
        p = np.zeros(n + 1)
        dp = np.zeros(n + 1)
        p[0] = math.exp(-0.5 * self.log_mass)
        prev, dprev, b_prev = 0.0, 0.0, 0.0
        for k in range(n):
            a, b = self.diag[k], self.offdiag[k]
            p[k + 1] = ((x - a) * p[k] - b_prev * prev) / b
            dp[k + 1] = (p[k] + (x - a) * dp[k] - b_prev * dprev) / b
            prev, dprev, b_prev = p[k], dp[k], b
        return p, dp


def _stieltjes(weight: TruncatedExpWeight, n: int, m: int):
    alpha, c = weight.alpha, weight.rate
    rule = gauss_legendre(m, 0.0, alpha)
    x = rule.nodes
    # the weighted start vector spans exp(+-c alpha / 2); normalize in log
    # space so W / mass never underflows
    log_w = np.log(rule.weights) - c * x
    top = float(np.max(log_w))
    log_mass = top + math.log(float(np.sum(np.exp(log_w - top))))
    q = np.exp(0.5 * (log_w - log_mass))
    q_prev = np.zeros_like(q)
    diag = np.empty(n)
    offdiag = np.empty(n)
    b_prev = 0.0
    for k in range(n):
        a = float(np.sum(x * q * q))
        r = (x - a) * q - b_prev * q_prev
        b = math.sqrt(float(np.sum(r * r)))
        if not (b > 0 and math.isfinite(b)):
            raise ConditioningError(
                f"Stieltjes recurrence for alpha={alpha}, rate={c} lost positivity at degree {k + 1}",
                largest_usable=k,
            )
        diag[k] = a
        offdiag[k] = b
        q_prev, q, b_prev = q, r / b, b
    return log_mass, diag, offdiag


def build_halfline_system(
    weight: TruncatedExpWeight, n: int, m: int | None = None
) -> HalfLineOPSystem:
    """Orthonormal p_0 .. p_n by the discretized Stieltjes procedure."""
    n = _check_order(n)
    if m is None:
        m = max(200, 8 * n)
    log_mass, diag, offdiag = _stieltjes(weight, n, m)
    diag.setflags(write=False)
    offdiag.setflags(write=False)
    proto = HalfLineOPSystem(weight, n, log_mass, diag, offdiag, (0.0, 0.0), (0.0, 0.0))
    fine = HalfLineOPSystem(weight, n, *_stieltjes(weight, n, 2 * m), (0.0, 0.0), (0.0, 0.0))
    coarse_logdet, fine_logdet = proto.log_det(n + 1), fine.log_det(n + 1)
    gap = abs(coarse_logdet - fine_logdet)
    if gap > STIELTJES_GRID_TOL * max(1.0, abs(fine_logdet)):
        raise ConditioningError(
            f"Stieltjes recurrence for n={n}, alpha={weight.alpha} not grid-converged "
            f"(m={m} vs {2 * m}: {gap:.3g})"
        )
    p, dp = proto.evaluate(weight.alpha)
    return HalfLineOPSystem(
        weight,
        n,
        log_mass,
        diag,
        offdiag,
        (float(p[n]), float(p[n - 1])),
        (float(dp[n]), float(dp[n - 1])),
    )
