import math
from fractions import Fraction

import mpmath
import pytest

from limitlab.special import (
    IteratedLogSpec,
    gamma_fn,
    gamma_moment,
    iterated_log,
    lambda_sigma,
    lambda_weight,
    script_O,
    zeta_tail,
)


class TestGammaFn:
    def test_integer_values(self):
        assert gamma_fn(1.0) == pytest.approx(1.0, abs=1e-14)
        assert gamma_fn(5.0) == pytest.approx(24.0, rel=1e-13)

    def test_half(self):
        assert gamma_fn(0.5) == pytest.approx(math.sqrt(math.pi), rel=1e-13)

    @pytest.mark.parametrize("x", [0.5 + i for i in range(21)])
    def test_recurrence(self, x):
        assert gamma_fn(x + 1.0) == pytest.approx(x * gamma_fn(x), rel=1e-10)

    @pytest.mark.parametrize("x", [0.0, -1.0, -0.5])
    def test_domain(self, x):
        with pytest.raises(ValueError):
            gamma_fn(x)


class TestLambdaSigma:
    def test_endpoints(self):
        assert lambda_sigma(0.0) == 1.0
        assert lambda_sigma(1.0) == pytest.approx(2.0, abs=1e-12)

    def test_half(self):
        assert lambda_sigma(0.5) == pytest.approx(4.0 / math.pi, rel=1e-12)

    def test_continuity_at_zero(self):
        assert abs(lambda_sigma(1e-3) - 1.0) < 1e-2

    @pytest.mark.parametrize("s", [-0.1, 1.1])
    def test_domain(self, s):
        with pytest.raises(ValueError):
            lambda_sigma(s)


class TestIteratedLog:
    def test_thresholds(self):
        assert [script_O(m) for m in range(4)] == [1, 2, 3, 16]

    def test_threshold_is_minimal(self):
        # t-1 either yields a nonpositive iterated log or is outside the
        # domain entirely; both mean "below threshold"
        for m in range(4):
            t = script_O(m)
            assert iterated_log(m, t) > 0
            if t > 1:
                try:
                    assert iterated_log(m, t - 1) <= 0
                except ValueError:
                    pass

    def test_spec_dataclass(self):
        spec = IteratedLogSpec.for_depth(2)
        assert (spec.m, spec.threshold) == (2, 3)


class TestLambdaWeight:
    def test_depth_zero_is_power(self):
        assert lambda_weight(0, 2.0, 3) == pytest.approx(9.0, abs=1e-14)
        assert lambda_weight(0, 0.0, 1) == 1.0

    def test_depth_one(self):
        assert lambda_weight(1, 1.0, 3) == pytest.approx(3.0 * math.log(3.0), rel=1e-14)

    def test_below_threshold(self):
        with pytest.raises(ValueError):
            lambda_weight(1, 1.0, 1)
        with pytest.raises(ValueError):
            lambda_weight(2, 2.0, 2)


class TestZetaTail:
    def test_basel(self):
        ts = zeta_tail(0, 2.0, 1)
        assert ts.truncation_bound <= 1e-10
        assert ts.value == pytest.approx(math.pi**2 / 6.0, abs=2e-10)

    def test_basel_from_two(self):
        ts = zeta_tail(0, 2.0, 2)
        assert ts.value == pytest.approx(math.pi**2 / 6.0 - 1.0, abs=2e-10)

    @pytest.mark.parametrize("s", [1.5, 2.0, 3.0])
    def test_against_mpmath(self, s):
        ours = zeta_tail(0, s, 1).value
        ref = float(mpmath.zeta(s))
        assert ours == pytest.approx(ref, abs=2e-10)

    def test_tolerance_contract(self):
        assert zeta_tail(0, 3.0, 1, tol=1e-10).truncation_bound <= 1e-10
        assert zeta_tail(1, 2.0, 2, tol=1e-6).truncation_bound <= 1e-6

    def test_telescoping(self):
        for m, s, n0 in [(0, 2.0, 1), (0, 1.5, 3), (1, 2.0, 2)]:
            tol = 1e-10 if m == 0 else 1e-6
            whole = zeta_tail(m, s, n0, tol=tol)
            rest = zeta_tail(m, s, n0 + 1, tol=tol)
            term = 1.0 / lambda_weight(m, s, n0)
            assert whole.value == pytest.approx(rest.value + term, abs=1e-12)

    def test_self_consistency_across_cutoffs(self):
        a = zeta_tail(1, 2.0, 2, tol=1e-4).value
        b = zeta_tail(1, 2.0, 2, tol=1e-6).value
        assert a == pytest.approx(b, abs=2e-4)

    def test_divergent_domain(self):
        with pytest.raises(ValueError):
            zeta_tail(0, 1.0, 1)
        with pytest.raises(ValueError):
            zeta_tail(0, 0.5, 1)

    def test_n0_below_threshold(self):
        with pytest.raises(ValueError):
            zeta_tail(1, 2.0, 1)


class TestGammaMoment:
    def test_exponential_factorial(self):
        assert gamma_moment(1.0, 3) == pytest.approx(6.0)

    def test_half(self):
        assert gamma_moment(0.5, 2) == pytest.approx(0.75)

    def test_empty_product(self):
        assert gamma_moment(2.7, 0) == 1

    def test_exact_rational_recursion(self):
        alpha = Fraction(1, 3)
        for k in range(8):
            assert gamma_moment(alpha, k + 1) == gamma_moment(alpha, k) * (k + alpha)

    def test_domain(self):
        with pytest.raises(ValueError):
            gamma_moment(0.0, 2)
        with pytest.raises(ValueError):
            gamma_moment(1.0, -1)
