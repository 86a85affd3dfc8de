"""Airy functions, log-factorials, incomplete gamma and zeta'(-1).

Airy evaluation uses three branches: the two Maclaurin series of the Airy
equation on [AIRY_SERIES_LEFT, AIRY_SERIES_RIGHT], and the Poincare
asymptotic expansions (truncated at their smallest term) outside it. The
Maclaurin series are summed in exact fixed-point integer arithmetic, so the
cancellation between the two series costs nothing; only the final rounding
to float is inexact.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass
from functools import lru_cache
from fractions import Fraction

import mpmath

from .errors import AiryDomainError, NumericalFailure
from .numerics import LogValue

__all__ = [
    "AIRY_RANGE",
    "Constants",
    "airy",
    "airy_ai",
    "airy_ai_prime",
    "constants",
    "log_factorial",
    "lower_incomplete_gamma",
    "regularized_lower_gamma",
    "zeta_prime_2",
]

AIRY_RANGE = (-15.0, 20.0)
AIRY_SERIES_LEFT = -8.0
AIRY_SERIES_RIGHT = 5.8

EULER_GAMMA = 0.57721566490153286061

GAMMA_SERIES_CAP = 500
GAMMA_CF_CAP = 500

_FIXED_BITS = 200
_ONE = 1 << _FIXED_BITS


def _airy_origin_values() -> tuple[int, int]:
    """Ai(0) and -Ai'(0) as fixed-point integers."""
    ctx = mpmath.MPContext()
    ctx.prec = _FIXED_BITS + 64
    three = ctx.mpf(3)
    c1 = three ** (-ctx.mpf(2) / 3) / ctx.gamma(ctx.mpf(2) / 3)
    c2 = three ** (-ctx.mpf(1) / 3) / ctx.gamma(ctx.mpf(1) / 3)
    scale = ctx.mpf(2) ** _FIXED_BITS
    return int(ctx.nint(c1 * scale)), int(ctx.nint(c2 * scale))


_AI0_FIXED, _MINUS_AIP0_FIXED = _airy_origin_values()


def _div(a: int, b: int) -> int:
    # integer division rounding toward zero
    return a // b if a >= 0 else -((-a) // b)


def _airy_series(x: float) -> tuple[float, float]:
    """Ai(x), Ai'(x) from the Maclaurin series, summed in fixed point."""
    X = int(Fraction(x) * _ONE)
    X3 = (X * X * X) >> (2 * _FIXED_BITS)
    # f = sum 3^k (1/3)_k x^{3k}/(3k)!,  g = sum 3^k (2/3)_k x^{3k+1}/(3k+1)!
    f = t = _ONE
    g = u = X
    df = 0
    v = (X * X) >> (_FIXED_BITS + 1)  # x^2/2, first term of f'
    dg = w = _ONE
    k = 1
    while t or u or v or w:
        t = _div(t * X3, (3 * k - 1) * 3 * k << _FIXED_BITS)
        u = _div(u * X3, 3 * k * (3 * k + 1) << _FIXED_BITS)
        w = _div(w * X3, (3 * k - 2) * 3 * k << _FIXED_BITS)
        f += t
        g += u
        dg += w
        df += v
        v = _div(v * X3, 3 * k * (3 * k + 2) << _FIXED_BITS)
        k += 1
        if k > 2000:
            raise NumericalFailure(f"Airy series did not terminate at x={x!r}")
    ai = (_AI0_FIXED * f - _MINUS_AIP0_FIXED * g) >> _FIXED_BITS
    aip = (_AI0_FIXED * df - _MINUS_AIP0_FIXED * dg) >> _FIXED_BITS
    return ai / _ONE, aip / _ONE


@lru_cache(maxsize=1)
def _asymptotic_coefficients(count: int = 80) -> tuple[tuple[float, ...], tuple[float, ...]]:
    u = [1.0]
    for k in range(1, count):
        u.append(u[-1] * (6 * k - 5) * (6 * k - 3) * (6 * k - 1) / ((2 * k - 1) * 216 * k))
    v = [1.0] + [-(6 * k + 1) / (6 * k - 1) * u[k] for k in range(1, count)]
    return tuple(u), tuple(v)


def _truncated_terms(coeffs, zeta: float) -> list[float]:
    """Terms c_k zeta^-k up to (excluding) the first growing one."""
    terms = [coeffs[0]]
    power = 1.0
    for k in range(1, len(coeffs)):
        power /= zeta
        term = coeffs[k] * power
        if abs(term) >= abs(terms[-1]):
            break
        terms.append(term)
    return terms


def _airy_asymptotic(x: float) -> tuple[float, float]:
    """Ai(x), Ai'(x) from the large-|x| expansions."""
    u, v = _asymptotic_coefficients()
    if x > 0:
        zeta = 2.0 / 3.0 * x**1.5
        su = _truncated_terms(u, zeta)
        sv = _truncated_terms(v, zeta)
        su = math.fsum(t if k % 2 == 0 else -t for k, t in enumerate(su))
        sv = math.fsum(t if k % 2 == 0 else -t for k, t in enumerate(sv))
        pre = math.exp(-zeta) / (2.0 * math.sqrt(math.pi))
        return pre * x**-0.25 * su, -pre * x**0.25 * sv
    t = -x
    zeta = 2.0 / 3.0 * t**1.5
    tu = _truncated_terms(u, zeta)
    tv = _truncated_terms(v, zeta)
    # even/odd parts with alternating signs (-1)^k u_{2k} zeta^{-2k}, ...
    ue = math.fsum((-1) ** (k // 2) * c for k, c in enumerate(tu) if k % 2 == 0)
    uo = math.fsum((-1) ** (k // 2) * c for k, c in enumerate(tu) if k % 2 == 1)
    ve = math.fsum((-1) ** (k // 2) * c for k, c in enumerate(tv) if k % 2 == 0)
    vo = math.fsum((-1) ** (k // 2) * c for k, c in enumerate(tv) if k % 2 == 1)
    phase = zeta - math.pi / 4.0
    c, s = math.cos(phase), math.sin(phase)
    root_pi = math.sqrt(math.pi)
    ai = t**-0.25 / root_pi * (c * ue + s * uo)
    aip = t**0.25 / root_pi * (s * ve - c * vo)
    return ai, aip


def airy(x: float) -> tuple[float, float]:
    """(Ai(x), Ai'(x)) for x in the validated range [-15, 20]."""
    x = float(x)
    if not AIRY_RANGE[0] <= x <= AIRY_RANGE[1]:
        raise AiryDomainError(f"Airy argument {x!r} outside validated range {AIRY_RANGE}")
    if AIRY_SERIES_LEFT <= x <= AIRY_SERIES_RIGHT:
        return _airy_series(x)
    return _airy_asymptotic(x)


def airy_ai(x: float) -> float:
    return airy(x)[0]


def airy_ai_prime(x: float) -> float:
    return airy(x)[1]


_STIRLING = (1.0 / 12, -1.0 / 360, 1.0 / 1260, -1.0 / 1680, 1.0 / 1188)
_EXACT_LOG_FACTORIAL_MAX = 256


@lru_cache(maxsize=1)
def _log_factorial_table() -> tuple[float, ...]:
    logs = [0.0] + [math.log(j) for j in range(1, _EXACT_LOG_FACTORIAL_MAX + 1)]
    return tuple(math.fsum(logs[: k + 1]) for k in range(_EXACT_LOG_FACTORIAL_MAX + 1))


def log_factorial(k: int) -> float:
    """ln(k!): exact summation up to 256, Stirling series beyond."""
    if int(k) != k or k < 0:
        raise ValueError(f"log_factorial needs a nonnegative integer, got {k!r}")
    k = int(k)
    if k <= _EXACT_LOG_FACTORIAL_MAX:
        return _log_factorial_table()[k]
    inv = 1.0 / k
    inv2 = inv * inv
    corr = 0.0
    p = inv
    for c in _STIRLING:
        corr += c * p
        p *= inv2
    return math.fsum([k * math.log(k), -k, 0.5 * math.log(2 * math.pi * k), corr])


def _series_prefactor_log(a: float, x: float) -> float:
    # ln(x^a e^-x / Gamma(a+1))
    return a * math.log(x) - x - math.lgamma(a + 1.0)


def _series_prefactor(a: float, x: float) -> float:
    """x^a e^-x / Gamma(a+1); a running product for integer a keeps it accurate."""
    if float(a).is_integer() and a <= 170:
        # order the factors so the running product stays in range
        value = math.exp(-x) if x < 700 else 0.0
        if value == 0.0:
            return math.exp(_series_prefactor_log(a, x))
        for j in range(1, int(a) + 1):
            value *= x / j
        return value
    return math.exp(_series_prefactor_log(a, x))


def _lower_series(a: float, x: float) -> float:
    """sum_k x^k / ((a+1)...(a+k)), so that P(a, x) = prefactor * sum."""
    total = term = 1.0
    for k in range(1, GAMMA_SERIES_CAP + 1):
        term *= x / (a + k)
        total += term
        if term < 1e-17 * total:
            return total
    raise NumericalFailure(f"incomplete gamma series did not converge (a={a}, x={x})")


def _upper_cf(a: float, x: float) -> float:
    """Continued fraction for Gamma(a, x) e^x x^-a (modified Lentz)."""
    tiny = 1e-300
    b = x + 1.0 - a
    c = 1.0 / tiny
    d = 1.0 / b
    h = d
    for i in range(1, GAMMA_CF_CAP + 1):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < tiny:
            d = tiny
        c = b + an / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < 1e-16:
            return h
    raise NumericalFailure(f"incomplete gamma continued fraction did not converge (a={a}, x={x})")


def _check_gamma_args(a: float, x: float) -> None:
    if not a > 0 or not math.isfinite(a):
        raise ValueError(f"incomplete gamma needs a > 0, got {a!r}")
    if not x >= 0 or not math.isfinite(x):
        raise ValueError(f"incomplete gamma needs finite x >= 0, got {x!r}")


EXACT_POISSON_MAX_A = 64
EXACT_POISSON_MAX_X = 256.0


def _poisson_split_exact(a: int, x: float) -> float:
    """P(a, x) for integer a as the exact rational ratio
    sum_{j>=a} x^j/j! / sum_{j>=0} x^j/j!, rounded once.

    The tail is truncated once a term drops below 2^-70 of it.
    """
    X = Fraction(x)
    term = Fraction(1)
    head = Fraction(0)
    for j in range(a):
        head += term
        term = term * X / (j + 1)
    tail = Fraction(0)
    j = a
    while True:
        tail += term
        term = term * X / (j + 1)
        j += 1
        if j > x and term * (1 << 70) < tail:
            break
    return float(tail / (head + tail))


def regularized_lower_gamma(a: float, x: float) -> float:
    """P(a, x) = gamma(a, x) / Gamma(a), accurate in the relative sense.

    Small integer a and moderate x (the Hankel moment range) are done in
    exact rational arithmetic, rounded once.
    """
    _check_gamma_args(a, x)
    if x == 0:
        return 0.0
    if float(a).is_integer() and a <= EXACT_POISSON_MAX_A and x <= EXACT_POISSON_MAX_X:
        return _poisson_split_exact(int(a), x)
    if x < a + 1.0:
        # x^a e^-x / Gamma(a+1) * sum, and Gamma(a+1) = a Gamma(a)
        return _series_prefactor(a, x) * _lower_series(a, x)
    return 1.0 - _regularized_upper(a, x)


def _regularized_upper(a: float, x: float) -> float:
    """Q(a, x) for x >= a + 1."""
    if float(a).is_integer() and a <= GAMMA_SERIES_CAP and x < 700:
        # Q(a, x) = e^-x sum_{j<a} x^j / j! exactly for integer a; the
        # positive finite sum avoids the rounding of lgamma in the prefactor
        term = math.exp(-x)
        terms = [term]
        for j in range(1, int(a)):
            term *= x / j
            terms.append(term)
        return math.fsum(terms)
    return math.exp(a * math.log(x) - x - math.lgamma(a)) * _upper_cf(a, x)


def lower_incomplete_gamma(a: float, x: float) -> LogValue:
    """gamma(a, x) = int_0^x t^(a-1) e^-t dt, in log form."""
    _check_gamma_args(a, x)
    if x == 0:
        return LogValue.zero()
    if x < a + 1.0:
        log_val = a * math.log(x) - x - math.log(a) + math.log(_lower_series(a, x))
        return LogValue(1, log_val)
    return LogValue(1, math.lgamma(a) + math.log1p(-_regularized_upper(a, x)))


# B_2, B_4, ..., B_20
_BERNOULLI = (
    Fraction(1, 6), Fraction(-1, 30), Fraction(1, 42), Fraction(-1, 30), Fraction(5, 66),
    Fraction(-691, 2730), Fraction(7, 6), Fraction(-3617, 510), Fraction(43867, 798),
    Fraction(-174611, 330),
)


def zeta_prime_2(cutoff: int = 30) -> float:
    """zeta'(2) = -sum ln k / k^2, with an Euler-Maclaurin tail from `cutoff`."""
    head = [-math.log(k) / (k * k) for k in range(2, cutoff)]
    N = float(cutoff)
    lnN = math.log(N)
    # tail of sum_{k>=N} f(k), f(x) = ln x / x^2
    tail = [(lnN + 1.0) / N, 0.5 * lnN / (N * N)]
    for j, b in enumerate(_BERNOULLI, start=1):
        m = 2 * j - 1
        # f^(m)(x) = (-1)^m (m+1)! x^(-m-2) (ln x - (H_{m+1} - 1))
        harmonic = math.fsum(1.0 / i for i in range(2, m + 2))
        deriv = (-1) ** m * math.factorial(m + 1) * N ** (-m - 2) * (lnN - harmonic)
        tail.append(-float(b) / math.factorial(2 * j) * deriv)
    return math.fsum(head) - math.fsum(tail)


@dataclass(frozen=True)
class Constants:
    zeta_prime_minus_one: float
    c0: float
    chi_tw: float


def _compute_constants() -> Constants:
    # log-derivative of the functional equation of zeta at s = -1
    zeta2 = math.pi**2 / 6.0
    zp2 = zeta_prime_2()
    zp = -(1.0 / 12.0) * (math.log(2 * math.pi) - 1.0 + EULER_GAMMA - zp2 / zeta2)
    ln2 = math.log(2.0)
    return Constants(
        zeta_prime_minus_one=zp,
        c0=ln2 / 12.0 + 3.0 * zp,
        chi_tw=ln2 / 24.0 + zp,
    )


_constants: Constants | None = None
_constants_lock = threading.Lock()


def constants() -> Constants:
    """zeta'(-1) and the two large-gap constants built from it (computed once)."""
    global _constants
    if _constants is None:
        with _constants_lock:
            if _constants is None:
                _constants = _compute_constants()
    return _constants
