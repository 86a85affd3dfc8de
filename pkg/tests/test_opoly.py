import math

import mpmath
import numpy as np
import pytest

from gapasym.errors import ConditioningError
from gapasym.numerics import gauss_legendre, log_det_cholesky
from gapasym.opoly import (
    TruncatedExpWeight,
    build_circle_system,
    build_halfline_system,
    circle_quadrature_size,
    fourier_coeff_arc,
)
from gapasym.specfun import lower_incomplete_gamma
from gapasym.structured import hankel_logdet_moments, toeplitz_logdet_moments


def trapezoid_fourier(k, alpha, points=2000):
    """(1/2pi) int_alpha^{2pi-alpha} cos(k theta) dtheta by the trapezoid rule
    with its first Euler-Maclaurin endpoint correction."""
    a, b = alpha, 2 * math.pi - alpha
    x = np.linspace(a, b, points + 1)
    h = (b - a) / points
    f = np.cos(k * x)
    trap = h * (f.sum() - 0.5 * (f[0] + f[-1]))
    dfa, dfb = -k * math.sin(k * a), -k * math.sin(k * b)
    return (trap - h * h / 12 * (dfb - dfa)) / (2 * math.pi)


def mp_hankel_logdet(n, alpha):
    ctx = mpmath.MPContext()
    ctx.dps = 60
    c = 4 * n
    mom = [ctx.gammainc(k + 1, 0, c * alpha) / ctx.mpf(c) ** (k + 1) for k in range(2 * n)]
    M = ctx.matrix(n, n)
    for i in range(n):
        for j in range(n):
            M[i, j] = mom[i + j]
    return float(ctx.log(ctx.det(M)))


class TestFourier:
    def test_zero(self):
        for a in (0.1, 1.0, 3.0):
            assert fourier_coeff_arc(0, a) == 1 - a / math.pi

    def test_small_alpha(self):
        assert abs(fourier_coeff_arc(4, 1e-12)) <= 1e-11

    def test_even(self):
        assert fourier_coeff_arc(-3, 1.1) == fourier_coeff_arc(3, 1.1)

    def test_quadrature_oracle(self):
        assert abs(fourier_coeff_arc(3, 1.1) - trapezoid_fourier(3, 1.1)) <= 1e-10

    @pytest.mark.parametrize("alpha", [0.0, math.pi, -1.0])
    def test_domain(self, alpha):
        with pytest.raises(ValueError):
            fourier_coeff_arc(1, alpha)


class TestCircle:
    def test_first_leading_coefficient(self):
        for a in (0.3, 1.2, 2.9):
            S = build_circle_system(a, 1)
            assert S.chi[0] == pytest.approx((1 - a / math.pi) ** -0.5, rel=1e-14)

    def test_orthonormality(self):
        alpha = 1.2
        S = build_circle_system(alpha, 3)
        q = gauss_legendre(400, alpha, 2 * math.pi - alpha)
        z = np.exp(1j * q.nodes)
        phi = {k: np.polyval(S.coefficients(k)[::-1], z) for k in (1, 2)}

        def inner(f, g):
            return np.sum(q.weights * f * np.conj(g)) / (2 * math.pi)

        assert abs(inner(phi[2], phi[1])) <= 1e-9
        assert abs(inner(phi[2], phi[2]) - 1) <= 1e-9

    def test_coefficients_are_real_and_match_chi(self):
        S = build_circle_system(0.9, 6)
        for k in range(7):
            c = S.coefficients(k)
            assert c.dtype == np.float64
            assert c[-1] == pytest.approx(S.chi[k], rel=1e-12)

    def test_identity_against_double_precision_moments(self):
        n, alpha = 6, 2.0
        T = np.array([[fourier_coeff_arc(i - j, alpha) for j in range(n)] for i in range(n)])
        S = build_circle_system(alpha, n)
        assert abs(-2 * np.sum(S.log_chi[:n]) - log_det_cholesky(T).log_abs) <= 1e-10

    @pytest.mark.parametrize("alpha", [0.5, 1.5, 2.5])
    def test_identity_against_multiprecision_moments(self, alpha):
        S = build_circle_system(alpha, 20)
        worst = max(
            abs(S.log_det(n) - toeplitz_logdet_moments(n, alpha).log_abs) for n in range(1, 21)
        )
        assert worst <= 1e-9

    def test_edge_values_match_evaluate(self):
        S = build_circle_system(1.0, 5)
        p, dp = S.evaluate(complex(math.cos(1.0), math.sin(1.0)))
        assert S.phi_at_edge == p[5] and S.dphi_at_edge == dp[5]

    def test_quadrature_size_is_enough(self):
        a, n = 0.3, 40
        base = build_circle_system(a, n).log_det()
        fine = build_circle_system(a, n, m=3 * circle_quadrature_size(n, a)).log_det()
        assert abs(base - fine) <= 1e-11 * abs(fine)

    def test_degenerate_arc(self):
        # a sliver of arc sampled at fewer nodes than the requested degree
        with pytest.raises(ConditioningError) as info:
            build_circle_system(math.pi - 1e-3, 100)
        assert 0 < info.value.largest_usable < 100

    def test_bad_input(self):
        with pytest.raises(ValueError):
            build_circle_system(1.0, 0)
        with pytest.raises(ValueError):
            build_circle_system(4.0, 3)


class TestHalfLine:
    def test_first_leading_coefficient(self):
        alpha = 0.6
        H = build_halfline_system(TruncatedExpWeight(alpha, 1), 1)
        mass = -math.expm1(-4 * alpha) / 4
        assert H.kappa[0] == pytest.approx(mass**-0.5, rel=1e-14)

    def test_orthonormality_on_finer_grid(self):
        H = build_halfline_system(TruncatedExpWeight(0.8, 6), 6)
        q = gauss_legendre(600, 0.0, 0.8)
        P = np.array([H.evaluate(x)[0] for x in q.nodes])
        w = q.weights * np.exp(-24 * q.nodes)
        assert abs(np.sum(w * P[:, 3] * P[:, 2])) <= 1e-9
        assert abs(np.sum(w * P[:, 3] ** 2) - 1) <= 1e-9

    def test_identity_against_incomplete_gamma_moments(self):
        n, alpha = 8, 0.9
        c = 4 * n
        mom = [float(lower_incomplete_gamma(k + 1, c * alpha)) / c ** (k + 1) for k in range(2 * n - 1)]
        M = np.array([[mom[i + j] for j in range(n)] for i in range(n)])
        H = build_halfline_system(TruncatedExpWeight(alpha, n), n)
        assert abs(-2 * np.sum(H.log_kappa[:n]) - log_det_cholesky(M).log_abs) <= 1e-7

    @pytest.mark.parametrize("alpha", [0.4, 0.9])
    def test_equivalence_small_orders(self, alpha):
        for n in range(1, 11):
            H = build_halfline_system(TruncatedExpWeight(alpha, n), n)
            assert abs(H.log_det() - hankel_logdet_moments(n, alpha).log_abs) <= 1e-7

    @pytest.mark.parametrize("alpha", [0.4, 0.9])
    def test_large_orders_stay_finite(self, alpha):
        for n in (12, 20, 30, 40):
            H = build_halfline_system(TruncatedExpWeight(alpha, n), n)
            assert np.all(np.isfinite(H.log_kappa))
            assert np.all(H.offdiag > 0)
            with pytest.raises(ConditioningError):
                hankel_logdet_moments(n, alpha)

    @pytest.mark.parametrize("n,alpha", [(5, 0.4), (12, 0.9), (20, 0.9)])
    def test_against_multiprecision(self, n, alpha):
        H = build_halfline_system(TruncatedExpWeight(alpha, n), n)
        assert H.log_det() == pytest.approx(mp_hankel_logdet(n, alpha), rel=1e-12)

    @pytest.mark.parametrize("n,alpha", [(3, 0.7), (6, 0.9), (10, 0.4)])
    def test_derivative_consistency(self, n, alpha):
        H = build_halfline_system(TruncatedExpWeight(alpha, n), n)
        h = 1e-6
        fd = (H.evaluate(alpha + h)[0][n] - H.evaluate(alpha - h)[0][n]) / (2 * h)
        assert H.dp_at_edge[0] == pytest.approx(fd, rel=1e-5)

    def test_decoupled_rate(self):
        # the weight's n is a separate field from the system order
        w = TruncatedExpWeight(0.5, 10)
        H = build_halfline_system(w, 3)
        assert H.order == 3 and w.rate == 40.0

    def test_weight_function(self):
        w = TruncatedExpWeight(0.5, 2)
        assert w(0.25) == pytest.approx(math.exp(-2.0))
        assert w(0.75) == 0.0

    def test_bad_weight(self):
        with pytest.raises(ValueError):
            TruncatedExpWeight(0.0, 3)
        with pytest.raises(ValueError):
            TruncatedExpWeight(1.0, 0)
