import json
import math

import numpy as np
import pytest

from rieszlab.arith import PrecisionConfig
from rieszlab.errors import StripError
from rieszlab.integrals import (
    GRIDS,
    QuadratureResult,
    criterion_lhs_2_6,
    errata_entry,
    fourier_cosine,
    identity_2_3,
    identity_2_7,
    identity_3_2,
    identity_3_3,
    identity_3_4,
    integrate,
    laplace,
    laplace_constant,
    riesz_mellin_4_4,
    run_identity,
    s_cosine_closed,
    s_cosine_integral,
    summarize,
    write_errata,
)
from rieszlab.riesz import riesz_direct


class TestQuadrature:
    def test_polynomial_exact(self):
        r = integrate(lambda t: t**5 - 3 * t, 0.0, 2.0)
        assert r.value == pytest.approx(64 / 6 - 6, abs=1e-13)
        assert r.evaluations > 0

    def test_endpoint_peak(self):
        r = integrate(lambda t: np.exp(-1000 * t), 0.0, 50.0)
        assert r.value == pytest.approx(1e-3, rel=1e-12)

    def test_oscillatory_fourier_cosine(self):
        # integral_0^inf e^{-t} cos(x t) dt = 1/(1+x^2)
        for x in (0.5, 3.0, 20.0):
            r = fourier_cosine(lambda t: np.exp(-t), x)
            assert r.value == pytest.approx(1 / (1 + x * x), abs=1e-11)

    def test_slowly_decaying_fourier_cosine(self):
        # integral_0^inf cos(x t)/(1+t^2) dt = (pi/2) e^{-x}
        r = fourier_cosine(lambda t: 1 / (1 + t * t), 2.0)
        assert r.value == pytest.approx(math.pi / 2 * math.exp(-2.0), abs=1e-9)

    def test_laplace(self):
        # integral_0^inf e^{-s t} cos t dt = s/(s^2+1)
        for s in (0.3, 1.0, 5.0):
            assert laplace(np.cos, s).value == pytest.approx(s / (s * s + 1), abs=1e-11)

    def test_laplace_polynomial_growth(self):
        assert laplace(lambda t: t**2, 0.5).value == pytest.approx(16.0, rel=1e-10)

    def test_wynn_epsilon_accelerates_log2(self):
        from rieszlab.integrals import wynn_epsilon

        partial = np.cumsum([(-1) ** (k + 1) / k for k in range(1, 16)])
        assert abs(wynn_epsilon(partial) - math.log(2)) < 1e-10
        assert abs(partial[-1] - math.log(2)) > 1e-2

    def test_result_validation(self):
        with pytest.raises(ValueError):
            QuadratureResult(1.0, -1.0, 1)


class TestIdentity23:
    @pytest.mark.parametrize("a, b", [(1.0, 0.0), (1.0, 1.0), (2.0, 3.0)])
    def test_matches(self, a, b):
        r = identity_2_3(a, b)
        assert r.status == "match"
        assert r.ratio == pytest.approx(1.0, abs=1e-8)

    def test_b_zero_is_reciprocal(self):
        assert identity_2_3(4.0, 0.0).rhs == pytest.approx(0.25, rel=1e-14)

    def test_domain(self):
        with pytest.raises(ValueError):
            identity_2_3(0.0, 1.0)


class TestIdentity27:
    def test_semi_analytic_split_consistent(self):
        c = 2 * math.pi / 4.0
        assert s_cosine_integral(c).value == pytest.approx(s_cosine_closed(c), abs=1e-8)

    def test_matches_series(self):
        s = run_identity("2.7")
        assert s.status == "match"

    def test_ratio_to_trivial_sum_is_quarter(self):
        r = identity_2_7(16.0)
        assert r.extra["ratio_vs_trivial_sum"] == pytest.approx(0.25, rel=1e-6)

    def test_domain(self):
        with pytest.raises(ValueError):
            identity_2_7(-1.0)


class TestGaussianIdentities:
    def test_3_2_printed_off_by_beta(self):
        s = run_identity("3.2")
        assert s.status == "mismatch"
        assert s.reference_status == "match"
        for r in s.reports:
            if abs(r.rhs) > 1e-6:
                assert r.ratio == pytest.approx(r.params["beta"], rel=1e-6)

    def test_3_3_printed_off_by_two_beta_over_pi(self):
        s = run_identity("3.3")
        assert s.status == "mismatch"
        assert s.reference_status == "match"
        for r in s.reports:
            if abs(r.rhs) > 1e-6:
                assert r.ratio == pytest.approx(2 * r.params["beta"] / math.pi, rel=1e-6)

    def test_3_2_at_origin(self):
        r = identity_3_2(1.0, 0.0, 0.0)
        assert r.lhs == pytest.approx(math.sqrt(math.pi), rel=1e-12)
        assert r.status == "match"  # beta = 1 hides the prefactor

    def test_domain(self):
        with pytest.raises(ValueError):
            identity_3_2(0.0, 1.0, 1.0)
        with pytest.raises(ValueError):
            identity_3_3(-1.0, 1.0, 1.0)

    def test_3_4_reference_form_matches(self):
        s = run_identity("3.4")
        assert s.reference_status == "match"
        assert s.status == "mismatch"
        assert identity_3_4(0.0).lhs == 0.0


class TestLaplaceForm:
    def test_laplace_constant_is_two(self):
        r = laplace_constant()
        assert r["ratio"] == pytest.approx(2.0, rel=1e-6)
        assert r["spread"] < 1e-6

    def test_calibrated_left_side_reproduces_riesz(self, table30):
        for x in (10.0, 100.0):
            v = criterion_lhs_2_6(x, table30, variant="calibrated")
            assert v == pytest.approx(riesz_direct(x).value, abs=1e-4)

    def test_printed_left_side_does_not(self, table30):
        v = criterion_lhs_2_6(10.0, table30, variant="printed")
        assert abs(v - riesz_direct(10.0).value) > 1e-2

    def test_variant_validation(self, table30):
        with pytest.raises(ValueError):
            criterion_lhs_2_6(10.0, table30, variant="other")


class TestMellin:
    def test_matches_inside_strip(self, table30):
        r = riesz_mellin_4_4(1.5, table30)
        assert r.status == "match"
        assert abs(r.ratio - 1) < 1e-3

    def test_outside_strip(self, table30):
        with pytest.raises(StripError):
            riesz_mellin_4_4(2.5, table30)
        with pytest.raises(StripError):
            riesz_mellin_4_4(0.5, table30)

    def test_pole_margin(self, table30):
        with pytest.raises(StripError):
            riesz_mellin_4_4(1.99, table30)


class TestReports:
    def test_summary_constant_ratio(self):
        reps = [identity_3_2(2.0, 0.0, y) for y in (0.0, 0.5, 1.0)]
        s = summarize(reps)
        assert s.status == "constant-ratio"
        assert s.ratio == pytest.approx(2.0, rel=1e-8)

    def test_summary_needs_reports(self):
        with pytest.raises(ValueError):
            summarize([])

    def test_unknown_identity(self):
        with pytest.raises(ValueError):
            run_identity("9.9")

    def test_report_json_roundtrip(self):
        s = run_identity("2.3")
        d = json.loads(json.dumps(s.as_dict()))
        assert d["status"] == "match" and len(d["reports"]) == len(GRIDS["2.3"])

    def test_errata_merge(self, tmp_path):
        p = tmp_path / "sub" / "errata.json"
        write_errata(p, {"3.2": errata_entry(run_identity("3.2", grid=GRIDS["3.2"][:3]))})
        write_errata(p, {"2.2": {"ratio": 4.0}})
        data = json.loads(p.read_text())
        assert set(data) == {"2.2", "3.2"}
        assert data["3.2"]["status"] in ("match", "constant-ratio", "mismatch")

    def test_errata_recovers_from_corrupt_file(self, tmp_path):
        p = tmp_path / "errata.json"
        p.write_text("{not json")
        assert write_errata(p, {"x": 1}) == {"x": 1}
