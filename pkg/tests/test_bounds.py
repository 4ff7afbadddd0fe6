import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from symstat.bounds import (SequenceFamily, ineq7_check, lambda_phi_spread, lemma2_check,
                            phi_exponents, phi_n, psi_exponents, psi_n, verify_theorem1,
                            verify_theorem2, verify_theorem3)
from symstat.core import (FiniteDistribution, KernelSpec, KernelTable, bernoulli,
                          build_kernel, multisets, rademacher)
from symstat.errors import KernelError, NotDegenerateError


def const_dist(c):
    return FiniteDistribution((c,), (1.0,))


class TestPsi:
    def test_constant(self, kernels):
        t = psi_n(kernels["constant"].kernel, bernoulli(), 4, 2)
        assert t.terms == (256.0, 64.0, 16.0)
        assert t.argmax_k == 0 and t.max_value == 256

    def test_bernoulli_product(self, kernels):
        t = psi_n(kernels["bernoulli_product"].kernel, bernoulli(), 3, 2)
        assert t.terms == pytest.approx((81 / 16, 27 / 8, 9 / 4), rel=1e-14)
        assert t.argmax_k == 0 and t.max_value == pytest.approx(5.0625)

    def test_rejects_signed(self, kernels):
        with pytest.raises(KernelError):
            psi_n(kernels["rademacher_product"].kernel, rademacher(), 3, 2)

    def test_exponents(self):
        assert psi_exponents(3, 2.5) == [7.5, 6.0, 4.5, 3.0]
        assert phi_exponents(3, 4) == [6, 5, 4, 3]

    @pytest.mark.parametrize("c", [0.5, 3.0, 17.0])
    def test_argmax_scale_invariant(self, kernels, c):
        e = kernels["sum_power"]
        base = psi_n(e.kernel, e.dist, 5, 3)
        scaled = psi_n(e.kernel.map(lambda v: c * v), e.dist, 5, 3)
        assert scaled.argmax_k == base.argmax_k
        assert np.allclose(scaled.terms, np.array(base.terms) * c ** 3, rtol=1e-12)

    def test_ties_pick_smallest_k(self):
        # m=1, p=1: exponents (1, 1), both moments equal E Y
        k = KernelTable(1, 1, {(0,): 2.0})
        t = psi_n(k, const_dist(0.0), 5, 1)
        assert t.terms == (10.0, 10.0) and t.argmax_k == 0


class TestPhi:
    def test_rademacher_p4(self, kernels):
        t = phi_n(kernels["rademacher_product"].kernel, rademacher(), 3, 4)
        assert t.terms == (81.0, 27.0, 9.0) and t.argmax_k == 0

    def test_rademacher_p2(self, kernels):
        t = phi_n(kernels["rademacher_product"].kernel, rademacher(), 3, 2)
        assert t.terms == (9.0, 9.0, 9.0) and t.max_value == 9

    def test_constant_rejected(self, kernels):
        with pytest.raises(NotDegenerateError):
            phi_n(kernels["constant"].kernel, bernoulli(), 3, 4)

    def test_small_p_rejected(self, kernels):
        with pytest.raises(KernelError):
            phi_n(kernels["rademacher_product"].kernel, rademacher(), 3, 1.5)


class TestVerifyTheorem1:
    def test_constant_closed_form(self, kernels):
        rep = verify_theorem1(kernels["constant"].kernel, bernoulli(), list(range(2, 11)), 2)
        for row in rep.rows:
            assert row.ratio == pytest.approx(math.comb(row.n, 2) ** 2 / row.n ** 4, rel=1e-12)
        assert rep.rows[-1].ratio == pytest.approx(0.2025, rel=1e-12)
        assert not rep.violations

    def test_bernoulli_n3(self, kernels):
        rep = verify_theorem1(kernels["bernoulli_product"].kernel, bernoulli(), [3], 2)
        assert rep.rows[0].ratio == pytest.approx(1.5 / 5.0625, rel=1e-12)

    def test_zero_kernel_flagged(self):
        zero = build_kernel(KernelSpec("constant", 2, dist=bernoulli(), c=0.0))
        rep = verify_theorem1(zero, bernoulli(), [2, 3], 2)
        assert "degenerate-zero" in rep.flags
        assert rep.ratio_min is None and rep.ratios == []

    @pytest.mark.parametrize("p", [1, 2, 3, 1.7])
    def test_lower_bounds_hold(self, kernels, p):
        for e in kernels.values():
            if not e.nonnegative:
                continue
            rep = verify_theorem1(e.kernel, e.dist, list(range(e.kernel.order, 9)), p)
            assert not rep.violations, rep.violations

    def test_bad_grid(self, kernels):
        with pytest.raises(KernelError):
            verify_theorem1(kernels["constant"].kernel, bernoulli(), [3, 3], 2)
        with pytest.raises(KernelError):
            verify_theorem1(kernels["constant"].kernel, bernoulli(), [1, 2], 2)


class TestVerifyTheorem2:
    def test_rademacher_p4(self, kernels):
        rep = verify_theorem2(kernels["rademacher_product"].kernel, rademacher(), [3], 4)
        assert rep.rows[0].ratio == pytest.approx(21 / 81, rel=1e-12)

    def test_rademacher_p2_closed_form(self, kernels):
        grid = list(range(2, 31))
        rep = verify_theorem2(kernels["rademacher_product"].kernel, rademacher(), grid, 2)
        for row in rep.rows:
            assert row.ratio == pytest.approx(math.comb(row.n, 2) / row.n ** 2, rel=1e-12)
        assert rep.ratio_min == pytest.approx(0.25)
        assert not rep.violations

    def test_orthogonality_on_corpus(self, kernels):
        for e in kernels.values():
            if e.degenerate and e.kernel.order <= 2:
                rep = verify_theorem2(e.kernel, e.dist, list(range(2, 10)), 2)
                names = {c.name for c in rep.checks}
                assert "second_moment_orthogonality" in names
                assert not rep.violations

    def test_rademacher_p4_limit(self, kernels):
        # T_n / sqrt(C(n,2)) tends to (Z^2 - 1) / sqrt(2), and E(Z^2 - 1)^4 = 60
        rep = verify_theorem2(kernels["rademacher_product"].kernel, rademacher(), [40], 4)
        assert rep.rows[0].ratio == pytest.approx(3.2827, abs=1e-3)
        assert rep.rows[0].ratio < 60 / 16


class TestVerifyTheorem3:
    def test_rademacher_p4(self, kernels):
        rep = verify_theorem3(kernels["rademacher_product"].kernel, rademacher(), [3], 4)
        row = rep.rows[0]
        assert row.exact_moment == pytest.approx(21) and row.bound_value == pytest.approx(9)
        assert row.ratio == pytest.approx(7 / 3, rel=1e-12)

    def test_p2_ratio_is_one(self, kernels):
        rep = verify_theorem3(kernels["rademacher_product"].kernel, rademacher(),
                              list(range(2, 15)), 2)
        assert all(r == pytest.approx(1.0, rel=1e-12) for r in rep.ratios)
        assert not rep.violations

    def test_centered_g2_flat(self, kernels):
        e = kernels["centered_bernoulli_g2"]
        rep = verify_theorem3(e.kernel, e.dist, list(range(4, 13)), 4)
        assert all(np.isfinite(rep.ratios))
        # the ratio climbs towards E(Z^2 - 1)^4 / 4 = 15 and flattens out
        assert max(rep.ratios) < 15
        late = verify_theorem3(e.kernel, e.dist, list(range(24, 41, 4)), 4)
        assert 0 < late.slope_of_log_ratio < 0.15 < rep.slope_of_log_ratio

    def test_spread_bounded(self, kernels):
        e = kernels["rademacher_product"]
        rep = verify_theorem3(e.kernel, e.dist, list(range(2, 21)), 4)
        assert 1 <= lambda_phi_spread(rep) <= 8


class TestLemma2Check:
    def test_constant_equality(self):
        s = lemma2_check(SequenceFamily([const_dist(2.0)]), 1, 1.5, 2)
        assert s.part1 == pytest.approx(0.0, abs=1e-12)

    def test_two_ones(self):
        seq = SequenceFamily([const_dist(1.0), const_dist(1.0)])
        s = lemma2_check(seq, 1, 1.5, 2)
        assert seq.power_sum(1.5) == 2
        assert s.part1 == pytest.approx(0.0, abs=1e-12)
        assert s.ok

    def test_range_errors(self):
        seq = SequenceFamily([const_dist(1.0)])
        with pytest.raises(KernelError):
            lemma2_check(seq, 1, 3, 2, parts=[1])
        with pytest.raises(KernelError):
            lemma2_check(seq, 2, 1, 1.5, parts=[2])
        with pytest.raises(KernelError):
            lemma2_check(seq, 0.5, 1, 0.2)

    def test_negative_member(self):
        with pytest.raises(KernelError):
            SequenceFamily([FiniteDistribution((-1.0, 1.0), (0.5, 0.5))])


@st.composite
def families(draw):
    size = draw(st.integers(1, 4))
    members = []
    for _ in range(size):
        a = draw(st.floats(0, 5))
        b = draw(st.floats(0, 5).filter(lambda x, a=a: abs(x - a) > 1e-6))
        q = draw(st.floats(0.01, 0.99))
        members.append(FiniteDistribution((a, b), (q, 1 - q)))
    return SequenceFamily(members)


@settings(max_examples=200, deadline=None)
@given(families(), st.floats(1, 3), st.floats(0.01, 2), st.floats(0.01, 3))
def test_lemma2_interpolation(seq, gamma, ds, dp):
    s = gamma + ds
    p = s + dp
    slacks = lemma2_check(seq, gamma, s, p)
    assert slacks.ok, slacks


@settings(max_examples=200, deadline=None)
@given(families(), st.floats(1, 3), st.floats(0, 3), st.floats(0.01, 3))
def test_lemma2_product_part(seq, gamma, s, dp):
    slacks = lemma2_check(seq, gamma, s, gamma + dp, parts=[2])
    assert slacks.part2 >= -1e-12


class TestIneq7:
    @pytest.mark.parametrize("k,l,s,n", [(0, 1, 1, 4), (0, 2, 1.5, 6), (1, 2, 2, 3)])
    def test_constant(self, kernels, k, l, s, n):
        assert ineq7_check(kernels["constant"].kernel, bernoulli(), n, k, l, s) <= 1 + 1e-12

    def test_diagonal(self, kernels):
        for e in kernels.values():
            if not e.nonnegative:
                continue
            for k in range(e.kernel.order + 1):
                assert ineq7_check(e.kernel, e.dist, 5, k, k, 1.5) <= 1 + 1e-12

    def test_bernoulli_value(self, kernels):
        r = ineq7_check(kernels["bernoulli_product"].kernel, bernoulli(), 4, 0, 1, 1)
        # LHS = 4^4 / 16, RHS = max(4^4 / 16, 4^3 / 8, 4^4 / 16)
        assert r == pytest.approx(1.0, rel=1e-12)

    def test_randomized_finite(self):
        rng = np.random.default_rng(7)
        worst = 0.0
        for _ in range(200):
            s = int(rng.integers(1, 4))
            probs = rng.dirichlet(np.ones(s))
            probs[-1] = 1 - probs[:-1].sum()
            dist = FiniteDistribution(tuple(range(s)), tuple(probs))
            k = KernelTable(2, s, {key: float(rng.exponential()) for key in multisets(s, 2)})
            r = ineq7_check(k, dist, int(rng.integers(2, 10)), int(rng.integers(0, 3)),
                            int(rng.integers(0, 3)), float(rng.uniform(1, 3)))
            assert np.isfinite(r)
            worst = max(worst, r)
        assert worst > 0

    def test_rejects_signed(self, kernels):
        with pytest.raises(KernelError):
            ineq7_check(kernels["rademacher_product"].kernel, rademacher(), 3, 0, 1, 1)
