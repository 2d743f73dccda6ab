import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import special

from uavtc.errors import DomainError, NumericalError
from uavtc.numerics import (
    DEFAULT_QUAD,
    QuadratureSpec,
    bessel_i0,
    integrate,
    marcum_q1,
    qfunc,
    reg_lower_gamma,
)


def i0_series(x: float, terms: int = 60) -> float:
    """Power-series oracle for the zeroth modified Bessel function."""
    acc = 0.0
    term = 1.0
    for k in range(terms):
        if k > 0:
            term *= (x / 2.0) ** 2 / (k * k)
        acc += term
    return acc


def rician_tail_oracle(a: float, b: float) -> float:
    """Direct adaptive quadrature of the Rician density tail."""

    def density(x):
        return x * special.i0e(a * x) * math.exp(-0.5 * (x - a) ** 2)

    hi = max(a, b) + 40.0
    if b >= hi:
        return 0.0
    val, _ = __import__("scipy.integrate", fromlist=["quad"]).quad(
        density, b, hi, epsabs=1e-12, epsrel=1e-10, limit=300)
    return val


class TestBesselI0:
    def test_at_zero(self):
        assert bessel_i0(0.0) == 1.0

    @pytest.mark.parametrize("x,expected", [
        (1.0, 1.2660658777520082),     # frozen from the 60-term series oracle
        (10.0, 2815.716628466255),
    ])
    def test_series_oracle_frozen(self, x, expected):
        assert math.isclose(i0_series(x), expected, rel_tol=1e-14)
        assert math.isclose(bessel_i0(x), expected, rel_tol=1e-12)

    def test_matches_series_on_grid(self):
        for x in [0.1, 0.5, 2.0, 5.0, 15.0, 30.0]:
            assert math.isclose(bessel_i0(x), i0_series(x, 120), rel_tol=1e-12)

    def test_monotone_increasing_from_one(self):
        xs = [0.0, 0.3, 1.0, 2.5, 7.0, 20.0]
        vals = [bessel_i0(x) for x in xs]
        assert vals[0] == 1.0
        assert all(a < b for a, b in zip(vals, vals[1:]))

    def test_domain_errors(self):
        with pytest.raises(DomainError):
            bessel_i0(-1.0)
        with pytest.raises(DomainError):
            bessel_i0(float("nan"))


class TestMarcumQ1:
    def test_b_zero_is_one(self):
        for a in [0.0, 0.5, 3.0, 8.0]:
            assert marcum_q1(a, 0.0) == 1.0

    def test_a_zero_rayleigh_tail(self):
        for b in [0.1, 1.0, 2.0, 4.0]:
            assert math.isclose(marcum_q1(0.0, b), math.exp(-0.5 * b * b),
                                rel_tol=1e-14)

    def test_against_quadrature_oracle(self):
        a = math.sqrt(2.0 * 15.0)      # strong line-of-sight factor
        b = 4.08
        assert abs(marcum_q1(a, b) - rician_tail_oracle(a, b)) < 1e-8

    def test_oracle_grid_small(self):
        for a in [0.0, 1.0, 3.0, 5.477, 8.0]:
            for b in [0.2, 1.5, 4.0, 9.0]:
                assert abs(marcum_q1(a, b) - rician_tail_oracle(a, b)) < 1e-8

    def test_quadrature_fallback_large_arguments(self):
        # exponents beyond the series underflow switch
        a, b = 40.0, 38.0
        assert abs(marcum_q1(a, b) - rician_tail_oracle(a, b)) < 1e-8

    @settings(max_examples=50, deadline=None)
    @given(a=st.floats(0.0, 8.0), b1=st.floats(0.0, 10.0), b2=st.floats(0.0, 10.0))
    def test_monotone_nonincreasing_in_b(self, a, b1, b2):
        lo, hi = sorted((b1, b2))
        assert marcum_q1(a, hi) <= marcum_q1(a, lo) + 1e-12

    def test_range(self):
        for a in [0.0, 2.0, 6.0]:
            for b in [0.0, 1.0, 5.0, 12.0]:
                q = marcum_q1(a, b)
                assert 0.0 <= q <= 1.0

    def test_domain_errors(self):
        with pytest.raises(DomainError):
            marcum_q1(-0.1, 1.0)
        with pytest.raises(DomainError):
            marcum_q1(1.0, float("inf"))


class TestRegLowerGamma:
    def test_exponential_cdf(self):
        for x in [0.0, 0.5, 2.0, 10.0]:
            assert math.isclose(reg_lower_gamma(1.0, x), -math.expm1(-x),
                                abs_tol=1e-14)

    def test_zero_at_origin(self):
        for k in [0.3, 1.0, 4.2]:
            assert reg_lower_gamma(k, 0.0) == 0.0

    def test_integer_closed_form(self):
        # P(2, 2) = 1 - 3 e^{-2}, frozen from the closed form
        assert math.isclose(reg_lower_gamma(2.0, 2.0), 0.5939941502901619,
                            rel_tol=1e-12)

    @settings(max_examples=50, deadline=None)
    @given(k=st.floats(0.05, 20.0), x1=st.floats(0.0, 50.0), x2=st.floats(0.0, 50.0))
    def test_cdf_monotone(self, k, x1, x2):
        lo, hi = sorted((x1, x2))
        assert reg_lower_gamma(k, hi) >= reg_lower_gamma(k, lo) - 1e-12

    def test_tends_to_one(self):
        assert reg_lower_gamma(3.0, 200.0) == pytest.approx(1.0, abs=1e-12)

    def test_domain_errors(self):
        with pytest.raises(DomainError):
            reg_lower_gamma(0.0, 1.0)
        with pytest.raises(DomainError):
            reg_lower_gamma(1.0, -0.5)


class TestIntegrate:
    def test_linear(self):
        assert math.isclose(integrate(lambda x: x, 0.0, 1.0), 0.5,
                            abs_tol=1e-10)

    def test_rayleigh_normalization_semi_infinite(self):
        val = integrate(lambda x: x * math.exp(-0.5 * x * x), 0.0,
                        float("inf"))
        assert math.isclose(val, 1.0, abs_tol=1e-10)

    def test_rician_tail_self_consistency(self):
        b = math.sqrt(30.0)

        def pdf(x):
            return x * special.i0e(b * x) * math.exp(-0.5 * (x - b) ** 2)

        for beta in [0.5, 3.0, 6.0]:
            val = integrate(pdf, beta, float("inf"))
            assert abs(val - marcum_q1(b, beta)) < 1e-8

    def test_kink_points_help(self):
        f = lambda x: 1.0 if x < 0.3 else 0.0
        val = integrate(f, 0.0, 1.0, points=[0.3])
        assert math.isclose(val, 0.3, abs_tol=1e-9)

    def test_invalid_interval(self):
        with pytest.raises(DomainError):
            integrate(lambda x: x, 1.0, 1.0)

    def test_nonconvergence_carries_estimate(self):
        spec = QuadratureSpec(abs_tol=1e-13, rel_tol=1e-13, max_subdivisions=1)
        f = lambda x: math.sin(50.0 * x) * math.sin(31.0 * x) + 1.0
        with pytest.raises(NumericalError) as err:
            integrate(f, 0.0, 10.0, spec)
        assert err.value.best_estimate is not None


class TestQfunc:
    def test_reference_points(self):
        assert math.isclose(qfunc(0.0), 0.5, rel_tol=1e-14)
        assert math.isclose(qfunc(2.0), 0.02275013194817921, rel_tol=1e-12)

    def test_spec_defaults(self):
        assert DEFAULT_QUAD.abs_tol == 1e-10
        assert DEFAULT_QUAD.rel_tol == 1e-8
        with pytest.raises(DomainError):
            QuadratureSpec(abs_tol=0.0)
