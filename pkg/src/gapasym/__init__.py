"""Sine- and Airy-kernel gap probabilities, the Toeplitz and Hankel
determinants that approximate them, and their large-gap expansions."""

from .errors import AiryDomainError, ConditioningError, NotPositiveDefinite, NumericalFailure
from .numerics import LogValue, Quadrature, gauss_legendre
from .specfun import Constants, airy_ai, airy_ai_prime, constants
from .kernels import GapResult, NystromConfig, fredholm_det_airy, fredholm_det_sine
from .opoly import (
    CircleOPSystem,
    HalfLineOPSystem,
    TruncatedExpWeight,
    build_circle_system,
    build_halfline_system,
)
from .structured import (
    ScalingSequence,
    hankel_logdet_laguerre_full,
    hankel_logdet_trunc,
    scaling_limit_airy,
    scaling_limit_sine,
    selberg_logA,
    toeplitz_logdet_arc,
)
from .asymptotics import ExpansionValue, ResidualSeries, constant_recovery

__version__ = "0.1.0"
