"""Toeplitz and Hankel determinants for the arc symbol and the truncated
exponential weight, Selberg products, differential-identity checks and the
double-scaling drivers.

Toeplitz matrices are indexed by the arc symbol's Fourier coefficients; Hankel
matrices by the moments of exp(-4 n x) on (0, alpha). Large orders go through
the orthogonal polynomial systems in :mod:`gapasym.opoly`; the raw moment
matrices are only used as small-order cross-checks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import mpmath
import numpy as np

from .errors import ConditioningError, NotPositiveDefinite, NumericalFailure
from .kernels import default_m_airy, default_m_sine, fredholm_det_airy, fredholm_det_sine
from .numerics import LogValue, central_difference, gauss_legendre, log_det_cholesky
from .opoly import TruncatedExpWeight, build_circle_system, build_halfline_system
from .specfun import log_factorial, regularized_lower_gamma

__all__ = [
    "HANKEL_MOMENT_MAX_ORDER",
    "ScalingSequence",
    "default_step",
    "hankel_identity_sides",
    "hankel_logdet_laguerre_full",
    "hankel_logdet_moments",
    "hankel_logdet_trunc",
    "scaling_limit_airy",
    "scaling_limit_sine",
    "selberg_logA",
    "toeplitz_identity_sides",
    "toeplitz_logdet_arc",
    "toeplitz_logdet_moments",
    "toeplitz_smallarc_check",
    "toeplitz_smallarc_sides",
    "verify_identity_2det2",
    "verify_identity_hankel",
]

TOEPLITZ_CROSSCHECK_MAX_ORDER = 12
TOEPLITZ_CROSSCHECK_TOL = 1e-9
HANKEL_MOMENT_MAX_ORDER = 10
HANKEL_CROSSCHECK_TOL = 1e-7
SMALLARC_MAX_ORDER = 6
SMALLARC_MAX_GAP = 0.05
SMALLARC_NODES = 64


def _check_order(n, minimum: int = 1) -> int:
    if int(n) != n or n < minimum:
        raise ValueError(f"order must be an integer >= {minimum}, got {n!r}")
    return int(n)


def default_step(alpha: float) -> float:
    return 1e-6 * max(1.0, abs(alpha))


# --- Toeplitz ---------------------------------------------------------------


def toeplitz_logdet_moments(n: int, alpha: float) -> LogValue:
    """ln D_n(f_alpha) by Cholesky of the moment matrix in multiprecision.

    The pivots decay like cos(alpha/2)^(2k), so the working precision grows
    with n; meant for n up to a few dozen.
    """
    n = _check_order(n)
    if not (0.0 < alpha < math.pi):
        raise ValueError(f"arc parameter must lie in (0, pi), got {alpha!r}")
    ctx = mpmath.MPContext()
    ctx.dps = int(2 * n * max(-math.log10(math.cos(alpha / 2)), 0.0)) + 30
    a = ctx.mpf(alpha)
    coeffs = [1 - a / ctx.pi] + [-ctx.sin(k * a) / (ctx.pi * k) for k in range(1, n)]
    T = ctx.matrix(n, n)
    for i in range(n):
        for j in range(n):
            T[i, j] = coeffs[abs(i - j)]
    try:
        L = ctx.cholesky(T)
    except ValueError as exc:
        raise ConditioningError(
            f"arc moment matrix of order {n} not positive definite at alpha={alpha}"
        ) from exc
    return LogValue(1, float(2 * ctx.fsum(ctx.log(L[i, i]) for i in range(n))))


def toeplitz_logdet_arc(n: int, alpha: float) -> LogValue:
    """ln D_n(f_alpha) from the circle orthogonal polynomial system."""
    n = _check_order(n)
    value = build_circle_system(alpha, n).log_det(n)
    if n <= TOEPLITZ_CROSSCHECK_MAX_ORDER:
        ref = toeplitz_logdet_moments(n, alpha).log_abs
        if abs(value - ref) > TOEPLITZ_CROSSCHECK_TOL * max(1.0, abs(ref)):
            raise NumericalFailure(
                f"Toeplitz routes disagree at n={n}, alpha={alpha}: {value!r} vs {ref!r}"
            )
    return LogValue(1, value)


def toeplitz_smallarc_sides(n: int, alpha_near_pi: float) -> tuple[float, float]:
    """(ln D_n(f_alpha), ln of the small-arc model beta^(n^2) (2pi)^(-n) A_n).

    beta = pi - alpha. The determinant is taken in the monic basis (z + 1)^k,
    whose Gram matrix scaled by beta^-(j+k) stays O(1) as beta -> 0.
    """
    n = _check_order(n)
    if n > SMALLARC_MAX_ORDER:
        raise ValueError(f"small-arc check supports n <= {SMALLARC_MAX_ORDER}, got {n}")
    beta = math.pi - alpha_near_pi
    if not (0.0 < beta <= SMALLARC_MAX_GAP):
        raise ValueError(f"need 0 < pi - alpha <= {SMALLARC_MAX_GAP}, got {beta!r}")
    # theta = pi + u on the arc, so z + 1 = 1 - exp(iu)
    rule = gauss_legendre(SMALLARC_NODES, -beta, beta)
    scaled = (1.0 - np.exp(1j * rule.nodes)) / beta
    powers = scaled[None, :] ** np.arange(n)[:, None]
    G = ((powers * rule.weights) @ powers.conj().T).real / (2.0 * math.pi)
    G = 0.5 * (G + G.T)
    log_d = log_det_cholesky(G).log_abs + n * (n - 1) * math.log(beta)
    model = n * n * math.log(beta) - n * math.log(2.0 * math.pi) + selberg_logA(n).log_abs
    return log_d, model


def toeplitz_smallarc_check(n: int, alpha_near_pi: float) -> float:
    """|D_n(f_alpha) / model - 1| for the arc close to the full circle."""
    log_d, model = toeplitz_smallarc_sides(n, alpha_near_pi)
    return abs(math.expm1(log_d - model))


def toeplitz_identity_sides(n: int, alpha: float, h: float | None = None) -> tuple[float, float]:
    """(d/dalpha ln D_n by central difference, the same from phi_n at e^{i alpha}).

    rhs = (n/pi)|phi_n|^2 - (2/pi) Re[conj(phi_n) e^{i alpha} phi_n'].
    """
    n = _check_order(n, 2)
    h = default_step(alpha) if h is None else h
    if not h > 0:
        raise ValueError(f"step must be positive, got {h!r}")
    if not (h < alpha < math.pi - h):
        raise ValueError(f"need h < alpha < pi - h, got alpha={alpha!r}, h={h!r}")
    lhs = central_difference(lambda a: toeplitz_logdet_arc(n, a).log_abs, alpha, h)
    sys_ = build_circle_system(alpha, n)
    phi, dphi = sys_.phi_at_edge, sys_.dphi_at_edge
    edge = complex(math.cos(alpha), math.sin(alpha))
    rhs = n / math.pi * abs(phi) ** 2 - 2.0 / math.pi * (phi.conjugate() * edge * dphi).real
    return lhs, rhs


def verify_identity_2det2(n: int, alpha: float, h: float | None = None) -> float:
    lhs, rhs = toeplitz_identity_sides(n, alpha, h)
    return abs(lhs - rhs) / abs(rhs)


# --- Hankel -----------------------------------------------------------------


def _check_endpoint(alpha: float) -> None:
    if not (alpha > 0 and math.isfinite(alpha)):
        raise ValueError(f"weight endpoint must be positive and finite, got {alpha!r}")


def hankel_logdet_moments(n: int, alpha: float) -> LogValue:
    """ln D_n^H(w_alpha) by Cholesky of the raw moment matrix.

    moment(j, k) = gamma(j+k+1, 4 n alpha) (4n)^-(j+k+1). Factoring out the
    (4n)^-(j+k+1) scaling leaves G_jk = (j+k)! P(j+k+1, 4 n alpha), so
    ln det = -n^2 ln(4n) + ln det G. Capped at HANKEL_MOMENT_MAX_ORDER.
    """
    n = _check_order(n)
    _check_endpoint(alpha)
    if n > HANKEL_MOMENT_MAX_ORDER:
        raise ConditioningError(
            f"raw Hankel moment route is capped at n={HANKEL_MOMENT_MAX_ORDER}, got {n}",
            largest_usable=HANKEL_MOMENT_MAX_ORDER,
        )
    c = 4.0 * n
    scaled = [math.factorial(k) * regularized_lower_gamma(k + 1, c * alpha) for k in range(2 * n - 1)]
    G = np.array([[scaled[i + j] for j in range(n)] for i in range(n)])
    return LogValue(1, log_det_cholesky(G).log_abs - n * n * math.log(c))


def hankel_logdet_trunc(n: int, alpha: float) -> LogValue:
    """ln D_n^H(w_alpha) with w_alpha = exp(-4 n x) on (0, alpha)."""
    n = _check_order(n)
    _check_endpoint(alpha)
    value = build_halfline_system(TruncatedExpWeight(alpha, n), n).log_det(n)
    if n <= HANKEL_MOMENT_MAX_ORDER:
        try:
            ref = hankel_logdet_moments(n, alpha).log_abs
        except NotPositiveDefinite:
            # the Stieltjes grid check already vouched for value
            ref = None
        if ref is not None and abs(value - ref) > HANKEL_CROSSCHECK_TOL * max(1.0, abs(ref)):
            raise NumericalFailure(
                f"Hankel routes disagree at n={n}, alpha={alpha}: {value!r} vs {ref!r}"
            )
    return LogValue(1, value)


def hankel_identity_sides(n: int, alpha: float, h: float | None = None) -> tuple[float, float]:
    """(d/dalpha ln D_n^H by central difference, the same from p_n, p_{n-1} at alpha).

    Only the endpoint moves: the exponent rate 4n stays fixed because the
    weight is tied to the order n, not to alpha.
    rhs = (kappa_{n-1}/kappa_n) e^{-4 n alpha} (p_n' p_{n-1} - p_n p_{n-1}').
    """
    n = _check_order(n, 2)
    h = default_step(alpha) if h is None else h
    if not h > 0:
        raise ValueError(f"step must be positive, got {h!r}")
    if not alpha > h:
        raise ValueError(f"need alpha > h, got alpha={alpha!r}, h={h!r}")
    lhs = central_difference(lambda a: hankel_logdet_trunc(n, a).log_abs, alpha, h)
    weight = TruncatedExpWeight(alpha, n)
    sys_ = build_halfline_system(weight, n)
    p_n, p_prev = sys_.p_at_edge
    dp_n, dp_prev = sys_.dp_at_edge
    ratio = sys_.offdiag[n - 1]
    rhs = ratio * math.exp(-weight.rate * alpha) * (dp_n * p_prev - p_n * dp_prev)
    return lhs, rhs


def verify_identity_hankel(n: int, alpha: float, h: float | None = None) -> float:
    lhs, rhs = hankel_identity_sides(n, alpha, h)
    return abs(lhs - rhs) / abs(rhs)


def hankel_logdet_laguerre_full(n: int) -> LogValue:
    """ln D_n^H for exp(-4 n x) on the whole half-line: (4n)^-(n^2) prod k!^2."""
    n = _check_order(n)
    log_fact = math.fsum(log_factorial(k) for k in range(n))
    return LogValue(1, 2.0 * log_fact - n * n * math.log(4.0 * n))


def selberg_logA(n: int) -> LogValue:
    """ln A_n with A_n = 2^(n^2) prod_{k<n} k!^3 / (n+k)!."""
    n = _check_order(n)
    terms = [3.0 * log_factorial(k) - log_factorial(n + k) for k in range(n)]
    return LogValue(1, n * n * math.log(2.0) + math.fsum(terms))


# --- double scaling ---------------------------------------------------------


@dataclass(frozen=True)
class ScalingSequence:
    s: float
    orders: tuple[int, ...]
    values: tuple[float, ...]
    target: float

    @property
    def errors(self) -> tuple[float, ...]:
        return tuple(abs(v - self.target) for v in self.values)


def _check_orders(orders: Sequence[int]) -> tuple[int, ...]:
    out = tuple(_check_order(n) for n in orders)
    if not out:
        raise ValueError("need at least one order")
    if any(b <= a for a, b in zip(out, out[1:])):
        raise ValueError(f"orders must be strictly increasing, got {list(out)}")
    return out


def _check_positive_s(s: float) -> None:
    if not (s > 0 and math.isfinite(s)):
        raise ValueError(f"s must be positive and finite, got {s!r}")


def _sine_point(args):
    n, s = args
    return toeplitz_logdet_arc(n, 2.0 * s / n).log_abs


def _airy_point(args):
    n, s = args
    alpha = 1.0 - s / (2.0 * n) ** (2.0 / 3.0)
    return hankel_logdet_trunc(n, alpha).log_abs - hankel_logdet_laguerre_full(n).log_abs


def scaling_limit_sine(s: float, orders: Sequence[int], map: Callable = map) -> ScalingSequence:
    """ln D_n(f_{2s/n}) along `orders`, with the sine-kernel determinant as target.

    `map` lets a caller evaluate the orders in parallel; results keep input order.
    """
    _check_positive_s(s)
    orders = _check_orders(orders)
    for n in orders:
        if not 2.0 * s / n < math.pi:
            raise ValueError(f"need 2s/n < pi, got s={s}, n={n}")
    values = tuple(map(_sine_point, [(n, s) for n in orders]))
    target = fredholm_det_sine(s, 2 * default_m_sine(s)).log_det
    return ScalingSequence(float(s), orders, tuple(float(v) for v in values), target)


def scaling_limit_airy(s: float, orders: Sequence[int], map: Callable = map) -> ScalingSequence:
    """ln D_n^H(w_{alpha_n}) - ln D_n^H(w_inf) with alpha_n = 1 - s/(2n)^(2/3)."""
    _check_positive_s(s)
    orders = _check_orders(orders)
    for n in orders:
        if not 1.0 - s / (2.0 * n) ** (2.0 / 3.0) > 0:
            raise ValueError(f"alpha = 1 - s/(2n)^(2/3) must be positive, got s={s}, n={n}")
    values = tuple(map(_airy_point, [(n, s) for n in orders]))
    target = fredholm_det_airy(s, 2 * default_m_airy(s)).log_det
    return ScalingSequence(float(s), orders, tuple(float(v) for v in values), target)
