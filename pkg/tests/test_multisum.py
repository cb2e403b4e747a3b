import math

import numpy as np
import pytest

from limitlab.kernels import kernel_distance
from limitlab.multisum import (
    MultiSumResult,
    WeightSequence,
    phi,
    phi_curve,
    phi_fold_curves,
    predict,
    psi_curve,
    psi_general,
    u_sum,
    u_sum_curve,
)

from oracles import phi_bruteforce, phi_recursion, psi_bruteforce

WEIGHT_FAMILIES = {
    "n": lambda i: np.asarray(i, dtype=float),
    "n^2": lambda i: np.asarray(i, dtype=float) ** 2,
    "2sqrt(n)": lambda i: 2.0 * np.sqrt(np.asarray(i, dtype=float)),
    "(1+n)^2": lambda i: (1.0 + np.asarray(i, dtype=float)) ** 2,
}


def scalar(fn):
    return lambda j: float(fn(np.array([j]))[0])


class TestPhiExamples:
    def test_pairs_identity_weight(self):
        w = WeightSequence(weight=WEIGHT_FAMILIES["n"])
        # tuples (1,2), (1,3), (2,3): 1*1 + 1*(1/2) + (1/2)*1
        assert phi(w, 3, 2).value == pytest.approx(2.0, rel=1e-14)

    def test_single_fold_partial_sum(self):
        w = WeightSequence(weight=WEIGHT_FAMILIES["(1+n)^2"])
        assert phi(w, 3, 1).value == pytest.approx(1 / 4 + 1 / 9 + 1 / 16, rel=1e-14)

    def test_infeasible_gap_is_zero(self):
        w = WeightSequence(weight=WEIGHT_FAMILIES["n"], gap=2)
        res = phi(w, 3, 2)
        assert res.value == 0.0
        assert res.constrained

    def test_result_metadata(self):
        w = WeightSequence(weight=WEIGHT_FAMILIES["n"])
        res = phi(w, 5, 2)
        assert isinstance(res, MultiSumResult)
        assert (res.n, res.m, res.constrained) == (5, 2, False)


class TestPhiOracle:
    @pytest.mark.parametrize("name", list(WEIGHT_FAMILIES))
    @pytest.mark.parametrize("gap", [1, 2, 3])
    def test_matches_enumeration(self, name, gap):
        fn = WEIGHT_FAMILIES[name]
        w = WeightSequence(weight=fn, gap=gap)
        for n in (1, 4, 9, 12):
            for m in (1, 2, 4):
                got = phi(w, n, m).value
                want = phi_bruteforce(scalar(fn), n, m, gap)
                assert got == pytest.approx(want, rel=1e-12, abs=1e-15)

    def test_matches_independent_recursion(self):
        fn = WEIGHT_FAMILIES["2sqrt(n)"]
        w = WeightSequence(weight=fn, gap=2)
        got = phi(w, 40, 3).value
        want = phi_recursion(scalar(fn), 40, 3, gap=2)
        assert got == pytest.approx(want, rel=1e-12)

    def test_monotone_in_horizon(self):
        w = WeightSequence(weight=WEIGHT_FAMILIES["2sqrt(n)"])
        vals = phi_curve(w, range(1, 60), 3)
        assert np.all(np.diff(vals) >= 0)

    def test_fft_matches_direct(self):
        w = WeightSequence(weight=WEIGHT_FAMILIES["(1+n)^2"])
        a = phi(w, 3000, 3, method="direct").value
        b = phi(w, 3000, 3, method="fft").value
        assert b == pytest.approx(a, rel=1e-12)

    def test_fold_curves_consistent(self):
        w = WeightSequence(weight=WEIGHT_FAMILIES["n^2"])
        mat = phi_fold_curves(w, [5, 20], 3)
        for q in (1, 2, 3):
            assert mat[q - 1, 1] == pytest.approx(phi(w, 20, q).value, rel=1e-13)

    def test_bad_args(self):
        w = WeightSequence(weight=WEIGHT_FAMILIES["n"])
        with pytest.raises(ValueError):
            phi(w, 0, 1)
        with pytest.raises(ValueError):
            phi(w, 3, 0)
        with pytest.raises(ValueError):
            phi(w, 3, 1, method="magic")
        with pytest.raises(ValueError):
            WeightSequence(weight=WEIGHT_FAMILIES["n"], gap=0)

    def test_negative_weight_rejected(self):
        w = WeightSequence(weight=lambda i: np.asarray(i, dtype=float) - 2.5)
        with pytest.raises(ValueError):
            phi(w, 5, 1)


class TestUSum:
    def test_examples(self):
        assert u_sum(1, 0, 1, 2.0, 2).value == pytest.approx(1.25, rel=1e-14)
        assert u_sum(2, 0, 1, 2.0, 3).value == pytest.approx(1.5, rel=1e-14)
        assert u_sum(2, 0, 1, 2.0, 1).value == 0.0

    def test_gap_below_threshold(self):
        with pytest.raises(ValueError):
            u_sum(1, 1, 1, 2.0, 10)

    def test_curve_matches_point(self):
        vals = u_sum_curve(2, 0, 1, 2.0, [3, 10])
        assert vals[0] == pytest.approx(u_sum(2, 0, 1, 2.0, 3).value, rel=1e-14)


class TestPsiGeneral:
    def setup_method(self):
        self.gw = kernel_distance(lambda i: (1.0 + np.asarray(i, dtype=float)) ** 2)

    def test_single_fold(self):
        assert psi_general(self.gw, 2, 1) == pytest.approx(13 / 36, rel=1e-14)

    def test_pair(self):
        assert psi_general(self.gw, 2, 2) == pytest.approx(1 / 16, rel=1e-14)

    def test_more_folds_than_indices(self):
        assert psi_general(self.gw, 2, 3) == 0.0

    def test_matches_enumeration(self):
        for n in (3, 6, 9):
            for m in (1, 2, 3):
                got = psi_general(self.gw, n, m)
                want = psi_bruteforce(self.gw, n, m)
                assert got == pytest.approx(want, rel=1e-12, abs=1e-16)

    def test_distance_kernel_equals_phi(self):
        # generic pairwise DP on a difference kernel == gap-1 convolution sum
        w = WeightSequence(weight=lambda i: (1.0 + np.asarray(i, dtype=float)) ** 2)
        for n, m in [(10, 1), (10, 2), (25, 3)]:
            assert psi_general(self.gw, n, m) == pytest.approx(phi(w, n, m).value, rel=1e-12)

    def test_curve_shape(self):
        mat = psi_curve(self.gw, [2, 5, 9], 2)
        assert mat.shape == (2, 3)
        assert mat[0, 0] == pytest.approx(13 / 36, rel=1e-14)


class TestPredict:
    def test_summable_constant(self):
        zeta = math.pi**2 / 6 - 1
        p = predict("summable", 3, zeta_value=zeta)
        assert p.scaling == "constant"
        assert p.coefficient == pytest.approx(zeta**3, rel=1e-14)

    def test_regularly_varying(self):
        p = predict("regularly_varying", 2, tau=0.5)
        assert p.scaling == "S(n)^m"
        assert p.coefficient == pytest.approx(math.pi / 4, rel=1e-12)

    def test_power(self):
        p = predict("power", 2, alpha=1.0)
        assert p.scaling == "(log n)^k"
        assert p.coefficient == pytest.approx(1.0, rel=1e-14)

    def test_power_moment_variant(self):
        p = predict("power", 2, alpha=2.0, beta=1.0, moment=True)
        assert p.coefficient == pytest.approx(6.0 / 4.0, rel=1e-14)

    def test_pi_consistency_of_the_two_routes(self):
        # route 1: regularly varying with tau = 1/2 and S(n) ~ 2 sqrt(n),
        # so the coefficient of Phi(n,2)/n is lambda^{-1} * 4
        via_rv = predict("regularly_varying", 2, tau=0.5).coefficient * 4.0
        # route 2: depth-0 weights i^(1/2), scale n^{k(1-sigma)} = n
        via_rzr = predict("rzr", 2, m=0, sigma=0.5).coefficient
        assert via_rv == pytest.approx(math.pi, rel=1e-10)
        assert via_rzr == pytest.approx(math.pi, rel=1e-10)
        assert via_rv == pytest.approx(via_rzr, rel=1e-10)

    def test_rzr_cases(self):
        const = predict("rzr", 2, m=0, sigma=2.0)
        assert const.scaling == "constant"
        assert const.coefficient == pytest.approx((math.pi**2 / 6) ** 2, abs=1e-9)
        crit = predict("rzr", 3, m=1, sigma=1.0)
        assert crit.scaling == "(log_{m+1} n)^k"
        assert crit.coefficient == 1.0
        deep = predict("rzr", 2, m=1, sigma=0.5)
        assert deep.scaling == "(log_m n)^{k(1-sigma)}"
        assert deep.coefficient == pytest.approx(4.0, rel=1e-14)
        zero = predict("rzr", 2, m=2, sigma=0.0)
        assert zero.scaling == "(log_m n)^k"

    def test_unsupported(self):
        with pytest.raises(ValueError):
            predict("rzr", 2, m=0, sigma=-0.5)
        with pytest.raises(ValueError):
            predict("mystery", 2)
        with pytest.raises(ValueError):
            predict("power", 0, alpha=1.0)
