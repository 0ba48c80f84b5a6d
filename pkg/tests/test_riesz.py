import math

import mpmath as mp
import numpy as np
import pytest

from conftest import mpv
from rieszlab.arith import PrecisionConfig
from rieszlab.errors import PrecisionError, ResourceError, SingularFitError
from rieszlab.riesz import (
    CANDIDATES,
    EvalResult,
    calibrate_explicit,
    calibrated,
    default_grid,
    explicit_formula,
    hermite_coefficient,
    order_estimate,
    required_bits,
    riesz_direct,
    riesz_explicit,
    riesz_hermite,
    riesz_maclaurin,
    series_2_2_rhs,
    trivial_ratio,
    trivial_sum,
    zero_sum,
    zero_sum_unfolded,
)

CFG = PrecisionConfig()
XS = ["0.5", "1", "5", "10", "20", "50"]


def ref(frozen, x):
    return float(mpv(frozen["riesz"][x]))


@pytest.mark.parametrize("x", XS)
def test_direct_against_oracle(frozen, x):
    r = riesz_direct(float(x), CFG)
    assert r.method == "direct"
    assert abs(r.value - ref(frozen, x)) <= r.abs_error_bound + 1e-15


@pytest.mark.parametrize("x", XS + ["100"])
def test_maclaurin_against_oracle(frozen, x):
    bits = max(256, required_bits(float(x)))
    r = riesz_maclaurin(float(x), CFG.with_(bits=bits))
    assert abs(r.value - ref(frozen, x)) <= r.abs_error_bound + 1e-15


@pytest.mark.parametrize("x", XS)
def test_hermite_against_oracle(frozen, x):
    u = math.sqrt(float(x))
    r = riesz_hermite(u, CFG)
    assert abs(r.value * float(x) - ref(frozen, x)) <= float(x) * r.abs_error_bound + 1e-15


def test_direct_small_x_leading_terms():
    # R(x) = x/zeta(2) - x^2/zeta(4) + O(x^3)
    x = 1e-6
    r = riesz_direct(x, CFG)
    expected = x * 6 / math.pi**2 - x * x * 90 / math.pi**4
    assert r.abs_error_bound < 1e-3 * x * x  # resolves the x^2 term
    assert abs(r.value - expected) <= r.abs_error_bound


def test_direct_resource_cap():
    with pytest.raises(ResourceError):
        riesz_direct(1e4, CFG.with_(max_terms=1000))


def test_direct_high_precision_path_agrees_with_float_path():
    loose = riesz_direct(200.0, CFG.with_(abs_tol=1e-9))
    tight = riesz_direct(200.0, CFG)
    assert abs(loose.value - tight.value) <= loose.abs_error_bound + tight.abs_error_bound


def test_domain_errors():
    with pytest.raises(ValueError):
        riesz_direct(0.0)
    with pytest.raises(ValueError):
        riesz_maclaurin(-1.0)


def test_maclaurin_precision_budget():
    assert required_bits(500) == 814
    with pytest.raises(PrecisionError):
        riesz_maclaurin(500, PrecisionConfig(bits=64))
    with pytest.raises(PrecisionError):
        riesz_hermite(30, PrecisionConfig(bits=256))  # x^2 = 900


def test_maclaurin_at_zero():
    assert riesz_maclaurin(0.0).value == 0.0


def test_hermite_coefficients():
    with mp.workprec(256):
        assert abs(hermite_coefficient(0) - 6 / mp.pi**2) < 1e-70
        assert abs(hermite_coefficient(2) + 90 / mp.pi**4) < 1e-70
    assert hermite_coefficient(3) == 0


def test_eval_result_validation():
    with pytest.raises(ValueError):
        EvalResult(1.0, 0.0, "bogus", 1)
    with pytest.raises(ValueError):
        EvalResult(1.0, -1.0, "direct", 1)
    with pytest.raises(ValueError):
        EvalResult(1.0, math.inf, "direct", 1)
    assert float(EvalResult(2.5, 0.0, "direct", 1)) == 2.5


class TestExplicitFormula:
    def test_calibration_picks_half_half(self, table30):
        cal = calibrated(table30, CFG)
        assert cal.winner == (0.5, 0.5)
        assert cal.distance < 1e-9
        assert cal.max_rel_residual < 1e-12
        assert set(cal.distances) == {f"({a:g},{b:g})" for a, b in CANDIDATES}

    @pytest.mark.parametrize("x", ["5", "20", "50", "100"])
    def test_explicit_against_oracle(self, table30, frozen, x):
        r = riesz_explicit(float(x), table30, CFG)
        assert r.method == "explicit"
        assert abs(r.value - ref(frozen, x)) < 1e-10

    def test_printed_coefficients_do_not_reproduce(self, table30):
        r = explicit_formula(10.0, 1, -1, table30, CFG)
        assert abs(r.value - riesz_direct(10.0).value) > 0.1

    def test_calibration_preconditions(self, table30):
        with pytest.raises(ValueError):
            calibrate_explicit(default_grid(6), table30, CFG)
        with pytest.raises(ValueError):
            calibrate_explicit(default_grid(16, 1, 200), table30, CFG)
        with pytest.raises(ValueError):
            calibrate_explicit(default_grid(), table30.head(10), CFG, K=10)
        with pytest.raises(SingularFitError):
            calibrate_explicit([1.0] * 4 + list(default_grid(8)), table30, CFG)

    def test_unfolded_sum_is_real(self, table30):
        z = zero_sum_unfolded(7.0, table30, 30, CFG)
        folded = zero_sum(7.0, table30, 30, CFG)
        assert abs(mp.im(z)) < 1e-60
        assert abs(float(mp.re(z)) - folded.value) < 1e-15

    def test_zero_sum_empty(self, table30):
        assert zero_sum(3.0, table30, 0).value == 0.0

    def test_zero_sum_needs_enriched_table(self):
        from rieszlab.zeros import load_ordinates, standard_ordinates_path

        with pytest.raises(ValueError):
            zero_sum(3.0, load_ordinates(standard_ordinates_path()), 3)

    def test_zero_sum_converges_in_K(self, table30, table60):
        a = zero_sum(50.0, table30, 30).value
        b = zero_sum(50.0, table60, 60).value
        assert abs(a - b) < 1e-12


class TestTrivialSum:
    @pytest.mark.parametrize("x", ["4", "16", "64"])
    def test_against_oracle(self, frozen, x):
        r = trivial_sum(float(x))
        assert r.method == "trivial_sum"
        assert abs(r.value - float(mpv(frozen["trivial_sum"][x]))) < 1e-13

    def test_ratio_to_closed_series(self):
        r = trivial_ratio((4.0, 16.0, 64.0))
        assert r["ratio"] == pytest.approx(4.0, rel=1e-12)
        assert r["spread"] < 1e-12

    def test_small_x_uses_more_precision(self):
        # terms peak near exp(pi^2/x); at x = 0.5 that is ~4e8, still summed correctly
        assert trivial_sum(0.5).value == pytest.approx(4 * float(series_2_2_rhs(0.5)), rel=1e-10)


class TestOrderEstimate:
    def test_lambda_n_against_oracle(self, frozen):
        est = order_estimate(100, window_start=10)
        for n, v in frozen["lambda_n"].items():
            i = int(np.flatnonzero(est.n == int(n))[0])
            assert est.lam[i] == pytest.approx(float(mpv(v)), rel=1e-12)

    def test_even_n_only_and_decreasing(self):
        est = order_estimate(400)
        assert np.all(est.n % 2 == 0)
        assert np.all(np.diff(est.lam[est.n >= 8]) < 0)

    def test_linear_fit_reported_separately(self):
        est = order_estimate(20_000)
        assert est.model == "reciprocal"
        assert est.limit_linear < est.limit
