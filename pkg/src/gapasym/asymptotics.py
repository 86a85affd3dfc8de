"""Large-gap and large-order expansions, and residuals of computed data
against them.

Each expansion keeps only the terms whose coefficients are known in closed
form; the dropped tails are what the residual series measure.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from typing import Callable, Sequence

from .errors import NumericalFailure
from .kernels import fredholm_det_airy, fredholm_det_sine
from .numerics import central_difference, estimate_order, richardson_extrapolate
from .specfun import constants, log_factorial
from .structured import default_step, hankel_logdet_trunc, selberg_logA, toeplitz_logdet_arc

__all__ = [
    "DYSON_RESIDUAL_TOL",
    "TW_RESIDUAL_TOL",
    "ExpansionValue",
    "ResidualSeries",
    "asf_alpha_derivative",
    "asf_eval",
    "circle_derivative_sides",
    "constant_recovery",
    "di2_rhs_eval",
    "diff_rhs_eval",
    "dyson_expansion",
    "halfline_derivative_sides",
    "hankel_delta_tilde_n",
    "intD2_alpha_derivative",
    "intD2_eval",
    "residual_tolerances",
    "selberg_delta_n",
    "tw_expansion",
]

# Calibration values: the remainders are O(1/s) and O(s^-3/2) with unknown
# constants; these assume the constants are at most 2.
DYSON_RESIDUAL_TOL = 0.02
TW_RESIDUAL_TOL = 0.01


def residual_tolerances() -> dict[str, float]:
    """Residual tolerances, overridable by GAPASYM_DYSON_TOL / GAPASYM_TW_TOL."""
    return {
        "dyson": float(os.environ.get("GAPASYM_DYSON_TOL", DYSON_RESIDUAL_TOL)),
        "tracy_widom": float(os.environ.get("GAPASYM_TW_TOL", TW_RESIDUAL_TOL)),
    }


@dataclass(frozen=True)
class ExpansionValue:
    terms: tuple[tuple[str, float], ...]
    total: float

    @classmethod
    def from_terms(cls, terms: Sequence[tuple[str, float]]) -> "ExpansionValue":
        terms = tuple((label, float(v)) for label, v in terms)
        return cls(terms, math.fsum(v for _, v in terms))

    def term(self, label: str) -> float:
        for name, value in self.terms:
            if name == label:
                return value
        raise KeyError(label)


@dataclass(frozen=True)
class ResidualSeries:
    parameter: tuple[float, ...]
    residual: tuple[float, ...]
    extrapolated_limit: float


def _check_positive(name: str, x: float) -> None:
    if not (x > 0 and math.isfinite(x)):
        raise ValueError(f"{name} must be positive and finite, got {x!r}")


def _check_order(n) -> int:
    if int(n) != n or n < 1:
        raise ValueError(f"order must be a positive integer, got {n!r}")
    return int(n)


def dyson_expansion(s: float) -> ExpansionValue:
    """ln of the sine-kernel gap probability on (0, 2s) for large s."""
    _check_positive("s", s)
    return ExpansionValue.from_terms(
        [("quadratic", -0.5 * s * s), ("log", -0.25 * math.log(s)), ("c0", constants().c0)]
    )


def tw_expansion(s: float) -> ExpansionValue:
    """ln F_2(-s) for large s."""
    _check_positive("s", s)
    return ExpansionValue.from_terms(
        [("cubic", -s**3 / 12.0), ("log", -0.125 * math.log(s)), ("chi", constants().chi_tw)]
    )


def _check_arc(alpha: float) -> None:
    if not (0.0 < alpha < math.pi):
        raise ValueError(f"arc parameter must lie in (0, pi), got {alpha!r}")


def _check_unit(alpha: float) -> None:
    if not (0.0 < alpha < 1.0):
        raise ValueError(f"endpoint must lie in (0, 1), got {alpha!r}")


def asf_eval(n: int, alpha: float) -> ExpansionValue:
    """ln D_n(f_alpha) for large n, uniform in the arc down to alpha ~ 1/n."""
    n = _check_order(n)
    _check_arc(alpha)
    half = 0.5 * alpha
    return ExpansionValue.from_terms(
        [
            ("quadratic", n * n * math.log(math.cos(half))),
            ("log", -0.25 * math.log(n * math.sin(half))),
            ("c0", constants().c0),
        ]
    )


def intD2_eval(n: int, alpha: float) -> ExpansionValue:
    """ln D_n^H(w_alpha) - ln D_n^H(w_inf) for large n, alpha away from 1."""
    n = _check_order(n)
    _check_unit(alpha)
    c = constants()
    return ExpansionValue.from_terms(
        [
            ("quadratic", n * n * (1.5 + math.log(alpha) - 2.0 * alpha + 0.5 * alpha * alpha)),
            ("log_n", -math.log(n) / 12.0),
            ("edge", -0.125 * math.log1p(-alpha * alpha)),
            ("log2", math.log(2.0) / 12.0),
            ("zeta_prime", c.zeta_prime_minus_one),
        ]
    )


def diff_rhs_eval(n: int, alpha: float) -> float:
    """Leading terms of d/dalpha ln D_n(f_alpha)."""
    n = _check_order(n)
    _check_arc(alpha)
    t = math.tan(0.5 * alpha)
    return -0.5 * n * n * t - 0.125 / t


def di2_rhs_eval(n: int, alpha: float) -> float:
    """Leading terms of d/dalpha ln D_n^H(w_alpha)."""
    n = _check_order(n)
    _check_unit(alpha)
    return n * n * (1.0 - alpha) ** 2 / alpha + alpha / (4.0 * (1.0 - alpha * alpha))


def asf_alpha_derivative(n: int, alpha: float) -> float:
    """Exact alpha-derivative of asf_eval's total."""
    n = _check_order(n)
    _check_arc(alpha)
    half = 0.5 * alpha
    return -0.5 * n * n * math.tan(half) - 0.125 * math.cos(half) / math.sin(half)


def intD2_alpha_derivative(n: int, alpha: float) -> float:
    """Exact alpha-derivative of intD2_eval's total."""
    n = _check_order(n)
    _check_unit(alpha)
    return n * n * (1.0 / alpha - 2.0 + alpha) + 0.25 * alpha / (1.0 - alpha * alpha)


def circle_derivative_sides(n: int, alpha: float, h: float | None = None) -> tuple[float, float]:
    """(central difference of ln D_n(f_alpha), diff_rhs_eval)."""
    rhs = diff_rhs_eval(n, alpha)
    h = default_step(alpha) if h is None else h
    if not h < min(alpha, math.pi - alpha):
        raise ValueError(f"step {h!r} too large for alpha={alpha!r}")
    lhs = central_difference(lambda a: toeplitz_logdet_arc(n, a).log_abs, alpha, h)
    return lhs, rhs


def halfline_derivative_sides(n: int, alpha: float, h: float | None = None) -> tuple[float, float]:
    """(central difference of ln D_n^H(w_alpha), di2_rhs_eval); the rate 4n is fixed."""
    rhs = di2_rhs_eval(n, alpha)
    h = default_step(alpha) if h is None else h
    if not h < min(alpha, 1.0 - alpha):
        raise ValueError(f"step {h!r} too large for alpha={alpha!r}")
    lhs = central_difference(lambda a: hankel_logdet_trunc(n, a).log_abs, alpha, h)
    return lhs, rhs


# --- residual series --------------------------------------------------------


def _check_increasing(values: Sequence[float], minimum: float, what: str) -> tuple[float, ...]:
    out = tuple(values)
    if not out:
        raise ValueError(f"need at least one {what}")
    if any(v < minimum for v in out):
        raise ValueError(f"every {what} must be >= {minimum}, got {list(out)}")
    if any(b <= a for a, b in zip(out, out[1:])):
        raise ValueError(f"{what}s must be strictly increasing, got {list(out)}")
    return out


def _extrapolate(params: Sequence[float], residuals: Sequence[float], fallback_order: float) -> float:
    """Limit of residuals as the parameter grows, Richardson in h = 1/parameter.

    The order is fitted from the last three points when possible.
    """
    if len(params) == 1:
        return float(residuals[0])
    hs = [1.0 / p for p in params]
    order = fallback_order
    if len(params) >= 3:
        try:
            order = estimate_order(hs, residuals)
        except NumericalFailure:
            pass
    return richardson_extrapolate(list(zip(hs, residuals)), order)


def selberg_delta_n(orders: Sequence[int]) -> ResidualSeries:
    """delta_n = ln A_n + n^2 ln 2 - n ln 2pi + (1/4) ln n - c0."""
    orders = _check_increasing([_check_order(n) for n in orders], 2, "order")
    c0 = constants().c0
    res = tuple(
        math.fsum(
            [
                selberg_logA(n).log_abs,
                n * n * math.log(2.0),
                -n * math.log(2.0 * math.pi),
                0.25 * math.log(n),
                -c0,
            ]
        )
        for n in orders
    )
    return ResidualSeries(tuple(float(n) for n in orders), res, _extrapolate(orders, res, 1.0))


def hankel_delta_tilde_n(orders: Sequence[int]) -> ResidualSeries:
    """ln A_n + n^2 ln(2n) - 2 sum_{k<n} ln k! - (3/2) n^2 + (1/12) ln(n/2) - zeta'(-1)."""
    orders = _check_increasing([_check_order(n) for n in orders], 2, "order")
    zp = constants().zeta_prime_minus_one
    res = tuple(
        math.fsum(
            [
                selberg_logA(n).log_abs,
                n * n * math.log(2.0 * n),
                -2.0 * math.fsum(log_factorial(k) for k in range(n)),
                -1.5 * n * n,
                math.log(0.5 * n) / 12.0,
                -zp,
            ]
        )
        for n in orders
    )
    return ResidualSeries(tuple(float(n) for n in orders), res, _extrapolate(orders, res, 1.0))


def _dyson_residual(s: float) -> float:
    return fredholm_det_sine(s).log_det + 0.5 * s * s + 0.25 * math.log(s) - constants().c0


def _tw_residual(s: float) -> float:
    return fredholm_det_airy(s).log_det + s**3 / 12.0 + 0.125 * math.log(s) - constants().chi_tw


_RECOVERY = {
    "dyson": (_dyson_residual, 1.0),
    "tracy_widom": (_tw_residual, 1.5),
}


def constant_recovery(kind: str, s_values: Sequence[float], map: Callable = map) -> ResidualSeries:
    """Residuals of Nystrom gap probabilities against the large-s expansions.

    kind is "dyson" (sine kernel) or "tracy_widom" (Airy kernel).
    """
    if kind not in _RECOVERY:
        raise ValueError(f"kind must be one of {sorted(_RECOVERY)}, got {kind!r}")
    s_values = _check_increasing([float(s) for s in s_values], 2.0, "s value")
    func, order = _RECOVERY[kind]
    res = tuple(float(r) for r in map(func, s_values))
    return ResidualSeries(s_values, res, _extrapolate(s_values, res, order))
