import itertools
import math

import numpy as np
import pytest

from naive import naive_cond_moment, naive_moment, table_fn
from symstat.core import (FiniteDistribution, KernelSpec, KernelTable, bernoulli,
                          build_kernel, multisets, rademacher)
from symstat.errors import BudgetExceeded, KernelError
from symstat.oracle import (class_weights, cond_moment, count_classes, exact_sumsq_moment,
                            exact_Tn_moment, iter_compositions, mc_crosscheck,
                            num_count_classes)
from symstat.montecarlo import McEstimate


def test_compositions_cover_simplex():
    comps = list(iter_compositions(5, 3))
    assert len(comps) == num_count_classes(5, 3) == 21
    assert len(set(comps)) == 21
    assert all(sum(c) == 5 for c in comps)


@pytest.mark.parametrize("n", [1, 5, 40, 120])
def test_weights_sum_to_one(n):
    d = FiniteDistribution((0, 1, 2), (0.2, 0.5, 0.3))
    counts = np.array(list(iter_compositions(n, 3)))
    assert math.fsum(class_weights(counts, d.p)) == pytest.approx(1.0, abs=1e-12)


def test_log_weights_match_exact():
    counts = np.array(list(iter_compositions(60, 2)))
    probs = np.array([0.3, 0.7])
    w = class_weights(counts, probs)
    for row, wi in zip(counts, w):
        exact = math.comb(60, int(row[0])) * 0.3 ** int(row[0]) * 0.7 ** int(row[1])
        assert wi == pytest.approx(exact, rel=1e-10)


def test_count_class_statistic_order_free(kernels):
    e = kernels["sum_power"]
    for cls in count_classes(e.kernel, e.dist, 4):
        sample = [i for i, c in enumerate(cls.counts) for _ in range(c)]
        values = [e.dist.values[i] for i in sample]
        for perm in set(itertools.permutations(values)):
            t = math.fsum((a + b) ** 2 for a, b in itertools.combinations(perm, 2))
            assert t == pytest.approx(cls.t_value, rel=1e-12)


class TestSpotValues:
    def test_constant(self, kernels):
        assert exact_Tn_moment(kernels["constant"].kernel, bernoulli(), 4, 2).value == 36

    def test_rademacher_n3(self, kernels):
        k = kernels["rademacher_product"].kernel
        r = exact_Tn_moment(k, rademacher(), 3, 4)
        assert r.value == pytest.approx(21, abs=1e-12)
        assert r.num_classes == 4

    def test_rademacher_n4(self, kernels):
        k = kernels["rademacher_product"].kernel
        assert exact_Tn_moment(k, rademacher(), 4, 4).value == pytest.approx(168, abs=1e-12)

    def test_bernoulli(self, kernels):
        k = kernels["bernoulli_product"].kernel
        assert exact_Tn_moment(k, bernoulli(), 3, 2).value == pytest.approx(1.5, abs=1e-12)

    def test_signed_odd_moment(self, kernels):
        # T = (S^2 - 3)/2 takes 3 w.p. 1/4 and -1 w.p. 3/4
        k = kernels["rademacher_product"].kernel
        r = exact_Tn_moment(k, rademacher(), 3, 3, absolute=False)
        assert r.value == pytest.approx((27 - 3) / 4, abs=1e-12)


def test_signed_noninteger_rejected(kernels):
    with pytest.raises(KernelError):
        exact_Tn_moment(kernels["rademacher_product"].kernel, rademacher(), 3, 2.5,
                        absolute=False)


def test_budget(kernels, monkeypatch):
    k = kernels["sum_power"]
    with pytest.raises(BudgetExceeded, match="Monte Carlo"):
        exact_Tn_moment(k.kernel, k.dist, 30, 2, budget=100)
    monkeypatch.setenv("USTAT_BUDGET", "10")
    with pytest.raises(BudgetExceeded):
        exact_Tn_moment(k.kernel, k.dist, 5, 2)


def test_n_below_order(kernels):
    with pytest.raises(KernelError):
        exact_Tn_moment(kernels["constant"].kernel, bernoulli(), 1, 2)


@pytest.mark.parametrize("p", [1, 1.5, 2, 3, 4])
def test_against_naive_enumeration(kernels, p):
    for e in kernels.values():
        fn = table_fn(e.kernel, e.dist)
        for n in range(2, 6):
            got = exact_Tn_moment(e.kernel, e.dist, n, p).value
            want = naive_moment(fn, e.dist.values, e.dist.probs, n, 2, p)
            assert got == pytest.approx(want, rel=1e-10, abs=1e-14)


def test_order_three_against_naive():
    d = FiniteDistribution((-1.0, 0.5, 2.0), (0.3, 0.4, 0.3))
    rng = np.random.default_rng(11)
    k = KernelTable(3, 3, {key: float(rng.normal()) for key in multisets(3, 3)})
    fn = table_fn(k, d)
    for n in (3, 4, 5):
        for p in (2, 3):
            assert exact_Tn_moment(k, d, n, p).value == pytest.approx(
                naive_moment(fn, d.values, d.probs, n, 3, p), rel=1e-10)


def test_workers_bit_identical(kernels, monkeypatch):
    import symstat.oracle as oracle
    monkeypatch.setattr(oracle, "CHUNK", 7)
    e = kernels["sum_power"]
    base = exact_Tn_moment(e.kernel, e.dist, 25, 3, workers=1).value
    for w in (2, 8):
        assert exact_Tn_moment(e.kernel, e.dist, 25, 3, workers=w).value == base


def test_large_n_is_finite(kernels):
    e = kernels["rademacher_product"]
    r = exact_Tn_moment(e.kernel, e.dist, 200, 2)
    assert r.value == pytest.approx(math.comb(200, 2), rel=1e-10)


class TestCondMoment:
    def test_square_of_signs(self, kernels):
        k = kernels["rademacher_product"].kernel
        for kk in range(3):
            assert cond_moment(k, rademacher(), kk, "square", 2) == 1

    def test_bernoulli_k0(self, kernels):
        assert cond_moment(kernels["bernoulli_product"].kernel, bernoulli(), 0,
                           "identity", 2) == 1 / 16

    def test_bernoulli_k1(self, kernels):
        assert cond_moment(kernels["bernoulli_product"].kernel, bernoulli(), 1,
                           "identity", 2) == 1 / 8

    def test_against_nested_loops(self, kernels):
        for e in kernels.values():
            fn = table_fn(e.kernel, e.dist)
            for kk in range(3):
                for r in (1, 1.5, 2, 3):
                    for square in (False, True):
                        if not square and not e.nonnegative and not float(r).is_integer():
                            continue
                        got = cond_moment(e.kernel, e.dist, kk,
                                          "square" if square else "identity", r)
                        want = naive_cond_moment(fn, e.dist.values, e.dist.probs, 2, kk, r,
                                                 square)
                        assert got == pytest.approx(want, rel=1e-12, abs=1e-15)

    def test_signed_fractional_rejected(self, kernels):
        with pytest.raises(KernelError):
            cond_moment(kernels["rademacher_product"].kernel, rademacher(), 2, "identity", 1.5)

    def test_monotone_in_k(self, kernels):
        for e in kernels.values():
            if not e.nonnegative:
                continue
            for p in (1, 1.5, 2, 3.5):
                vals = [cond_moment(e.kernel, e.dist, kk, "identity", p) for kk in range(3)]
                assert all(a <= b * (1 + 1e-12) for a, b in zip(vals, vals[1:]))

    def test_bad_k(self, kernels):
        with pytest.raises(KernelError):
            cond_moment(kernels["constant"].kernel, bernoulli(), 3)


class TestSumSquares:
    def test_rademacher(self, kernels):
        assert exact_sumsq_moment(kernels["rademacher_product"].kernel, rademacher(), 3, 4) == 9

    def test_constant_order3(self):
        k = build_kernel(KernelSpec("constant", 3, dist=bernoulli(), c=1.0))
        assert exact_sumsq_moment(k, bernoulli(), 5, 2) == 10

    def test_bernoulli(self, kernels):
        got = exact_sumsq_moment(kernels["bernoulli_product"].kernel, bernoulli(), 3, 4)
        assert got == pytest.approx(1.5, abs=1e-12)


def test_jensen_small_p(kernels):
    for e in kernels.values():
        if not e.degenerate:
            continue
        ey2 = cond_moment(e.kernel, e.dist, 0, "square", 1)
        for n in range(2, 9):
            for p in (1, 1.25, 1.5, 1.99):
                lhs = exact_Tn_moment(e.kernel, e.dist, n, p).value
                rhs = (math.comb(n, 2) * ey2) ** (p / 2)
                assert lhs <= rhs * (1 + 1e-10)


def test_second_moment_orthogonality(kernels):
    for e in kernels.values():
        if not e.degenerate:
            continue
        ey2 = cond_moment(e.kernel, e.dist, 0, "square", 1)
        for n in range(2, 15):
            got = exact_Tn_moment(e.kernel, e.dist, n, 2).value
            assert got == pytest.approx(math.comb(n, 2) * ey2, rel=1e-10)


class TestCrosscheck:
    def est(self, mean, stderr):
        return McEstimate(mean=mean, stderr=stderr, n_samples=10, seed=0, elapsed=0.0)

    def test_zero(self):
        assert mc_crosscheck(3.0, self.est(3.0, 0.1)) == 0

    def test_two(self):
        assert mc_crosscheck(3.0, self.est(3.2, 0.1)) == pytest.approx(2.0)

    def test_zero_stderr_disagreement(self):
        with pytest.raises(KernelError):
            mc_crosscheck(3.0, self.est(3.2, 0.0))

    def test_zero_stderr_agreement(self):
        assert mc_crosscheck(36.0, self.est(36.0, 0.0)) == 0.0
