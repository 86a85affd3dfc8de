import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gapasym.asymptotics import (
    DYSON_RESIDUAL_TOL,
    TW_RESIDUAL_TOL,
    ExpansionValue,
    asf_alpha_derivative,
    asf_eval,
    circle_derivative_sides,
    constant_recovery,
    di2_rhs_eval,
    diff_rhs_eval,
    dyson_expansion,
    halfline_derivative_sides,
    hankel_delta_tilde_n,
    intD2_alpha_derivative,
    intD2_eval,
    residual_tolerances,
    selberg_delta_n,
    tw_expansion,
)
from gapasym.kernels import fredholm_det_sine
from gapasym.specfun import constants
from gapasym.structured import hankel_logdet_laguerre_full, hankel_logdet_trunc, toeplitz_logdet_arc

C = constants()


class TestExpansions:
    def test_dyson_at_one(self):
        assert dyson_expansion(1.0).total == pytest.approx(-0.5 + C.c0, rel=1e-15)
        assert dyson_expansion(1.0).term("log") == 0.0

    def test_dyson_log_term_at_e(self):
        assert dyson_expansion(math.e).term("log") == pytest.approx(-0.25, rel=1e-15)

    def test_dyson_against_nystrom(self):
        assert abs(dyson_expansion(8.0).total - fredholm_det_sine(8.0).log_det) <= 0.02

    def test_tw_small(self):
        assert tw_expansion(1.0).total == pytest.approx(-1 / 12 + C.chi_tw, rel=1e-15)
        assert tw_expansion(2.0).term("cubic") == pytest.approx(-2 / 3, rel=1e-15)

    def test_unknown_term(self):
        with pytest.raises(KeyError):
            dyson_expansion(2.0).term("a1")

    def test_inputs(self):
        for bad in (0.0, -1.0, math.inf):
            with pytest.raises(ValueError):
                dyson_expansion(bad)
            with pytest.raises(ValueError):
                tw_expansion(bad)

    @given(st.lists(st.tuples(st.text(max_size=4), st.floats(-1e6, 1e6)), max_size=6))
    def test_total_is_sum(self, terms):
        value = ExpansionValue.from_terms(terms)
        assert value.total == math.fsum(v for _, v in terms)


class TestArcExpansion:
    def test_diverges_towards_full_arc(self):
        vals = [asf_eval(10, math.pi - eps).term("quadratic") for eps in (1e-1, 1e-3, 1e-6)]
        assert vals[0] > vals[1] > vals[2]
        assert vals[2] < -500

    def test_against_determinant(self):
        gaps = [abs(asf_eval(n, math.pi / 2).total - toeplitz_logdet_arc(n, math.pi / 2).log_abs) for n in (30, 60)]
        assert gaps[0] <= 0.05
        assert gaps[1] < gaps[0]

    def test_fixed_alpha_trend(self):
        gaps = [abs(asf_eval(n, 2.0).total - toeplitz_logdet_arc(n, 2.0).log_abs) for n in (10, 20, 40)]
        assert gaps[0] > gaps[1] > gaps[2]

    def test_coherence_with_dyson(self):
        s = 2.0
        diffs = [abs(asf_eval(n, 2 * s / n).total - dyson_expansion(s).total) for n in (64, 256)]
        assert diffs[1] <= 0.5 * diffs[0]

    def test_alpha_range(self):
        for bad in (0.0, math.pi, 4.0):
            with pytest.raises(ValueError):
                asf_eval(4, bad)
            with pytest.raises(ValueError):
                diff_rhs_eval(4, bad)


class TestHalfLineExpansion:
    def test_against_determinant(self):
        n, s = 64, 4.0
        alpha = 1 - s / (2 * n) ** (2 / 3)
        ratio = hankel_logdet_trunc(n, alpha).log_abs - hankel_logdet_laguerre_full(n).log_abs
        assert abs(intD2_eval(n, alpha).total - ratio) <= 0.05

    def test_quadratic_growth(self):
        q = [intD2_eval(n, 0.5).term("quadratic") for n in (8, 16, 32)]
        assert q[1] / q[0] == pytest.approx(4.0, rel=1e-14)
        assert q[2] / q[1] == pytest.approx(4.0, rel=1e-14)

    def test_edge_term_diverges(self):
        vals = [intD2_eval(5, 1 - eps).term("edge") for eps in (1e-2, 1e-6, 1e-12)]
        assert vals[0] < vals[1] < vals[2]
        assert vals[2] > 3

    def test_endpoint_range(self):
        for bad in (0.0, 1.0, 1.5):
            with pytest.raises(ValueError):
                intD2_eval(4, bad)
            with pytest.raises(ValueError):
                di2_rhs_eval(4, bad)


class TestDerivatives:
    def test_asf_derivative_matches_rhs(self):
        n = 64
        assert abs(asf_alpha_derivative(n, math.pi / 2) - diff_rhs_eval(n, math.pi / 2)) <= 1 / (8 * n)

    def test_intD2_derivative_matches_rhs(self):
        n = 64
        assert abs(intD2_alpha_derivative(n, 0.5) - di2_rhs_eval(n, 0.5)) <= 1 / n

    @settings(max_examples=50, deadline=None)
    @given(st.integers(1, 200), st.floats(0.05, 3.0))
    def test_asf_derivative_by_difference(self, n, alpha):
        h = 1e-5
        fd = (asf_eval(n, alpha + h).total - asf_eval(n, alpha - h).total) / (2 * h)
        assert fd == pytest.approx(asf_alpha_derivative(n, alpha), rel=1e-5, abs=1e-5)

    @settings(max_examples=50, deadline=None)
    @given(st.integers(1, 200), st.floats(0.05, 0.95))
    def test_intD2_derivative_by_difference(self, n, alpha):
        h = 1e-6
        fd = (intD2_eval(n, alpha + h).total - intD2_eval(n, alpha - h).total) / (2 * h)
        assert fd == pytest.approx(intD2_alpha_derivative(n, alpha), rel=1e-5, abs=1e-5)

    def test_circle_gap(self):
        n = 32
        fd, rhs = circle_derivative_sides(n, math.pi / 2)
        assert abs(fd - rhs) <= 5 / n

    def test_halfline_gap(self):
        n = 32
        fd, rhs = halfline_derivative_sides(n, 0.5)
        assert n * abs(fd - rhs) <= 10

    def test_step_guard(self):
        with pytest.raises(ValueError):
            circle_derivative_sides(8, 0.1, 0.2)
        with pytest.raises(ValueError):
            halfline_derivative_sides(8, 0.9, 0.2)


class TestResidualSeries:
    ORDERS = [50, 100, 200, 400]

    def test_selberg_delta(self):
        series = selberg_delta_n(self.ORDERS)
        r = series.residual
        assert abs(r[2]) < abs(r[0])
        assert all(abs(b) < abs(a) for a, b in zip(r, r[1:]))
        assert len({math.copysign(1, x) for x in r}) == 1
        assert abs(series.extrapolated_limit) <= 1e-4

    def test_hankel_delta(self):
        series = hankel_delta_tilde_n(self.ORDERS)
        r = series.residual
        assert abs(r[2]) < abs(r[0])
        assert abs(series.extrapolated_limit) <= 1e-4

    def test_small_order_representable(self):
        series = hankel_delta_tilde_n([2])
        assert math.isfinite(series.residual[0])
        assert series.extrapolated_limit == series.residual[0]

    def test_order_validation(self):
        with pytest.raises(ValueError):
            selberg_delta_n([1, 4])
        with pytest.raises(ValueError):
            selberg_delta_n([8, 4])
        with pytest.raises(ValueError):
            hankel_delta_tilde_n([])


class TestConstantRecovery:
    def test_dyson(self):
        series = constant_recovery("dyson", [4, 6, 8, 10])
        r = [abs(x) for x in series.residual]
        assert all(b < a for a, b in zip(r, r[1:]))
        assert r[-1] <= DYSON_RESIDUAL_TOL

    def test_tracy_widom(self):
        series = constant_recovery("tracy_widom", [3, 5, 8])
        r = [abs(x) for x in series.residual]
        assert all(b < a for a, b in zip(r, r[1:]))
        assert r[-1] <= TW_RESIDUAL_TOL

    def test_single_value(self):
        series = constant_recovery("dyson", [5.0])
        assert len(series.residual) == 1
        assert series.parameter == (5.0,)

    def test_validation(self):
        with pytest.raises(ValueError):
            constant_recovery("painleve", [4])
        with pytest.raises(ValueError):
            constant_recovery("dyson", [1.0, 4.0])
        with pytest.raises(ValueError):
            constant_recovery("dyson", [6.0, 4.0])

    def test_tolerance_override(self, monkeypatch):
        monkeypatch.delenv("GAPASYM_DYSON_TOL", raising=False)
        monkeypatch.delenv("GAPASYM_TW_TOL", raising=False)
        assert residual_tolerances() == {"dyson": 0.02, "tracy_widom": 0.01}
        monkeypatch.setenv("GAPASYM_DYSON_TOL", "0.05")
        assert residual_tolerances()["dyson"] == 0.05
