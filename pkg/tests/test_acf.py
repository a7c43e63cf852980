import math

import numpy as np
import pytest

from acf import (
    AcfSequence, Budget, acf_sums, efford, efford_finite_budget, efford_ratio,
    estimate_acf, fit_ar1_rho, monotone_theta_bound, n_samples, sample_acf,
    thinning_hurts,
)
from efficiency import ThinningProblem, eff
from errors import DomainError, InvalidAcfError, ZeroSampleError
from simulator import generate_ar1


def geometric(rho, length, policy="truncate"):
    return AcfSequence.ar1(rho, length, policy)


def random_acf(rng):
    L = int(rng.integers(1, 60))
    vals = rng.uniform(-1, 1, L) * 0.95 ** np.arange(1, L + 1)
    return AcfSequence(vals)


def random_monotone_acf(rng):
    L = int(rng.integers(1, 80))
    vals = np.sort(rng.uniform(0, 0.99, L))[::-1] * rng.uniform(0, 1)
    vals[rng.uniform(size=L) < 0.1] = 0.0
    return AcfSequence(np.sort(vals)[::-1])


class TestAcfSequence:
    def test_rejects_empty(self):
        with pytest.raises(InvalidAcfError):
            AcfSequence([])

    @pytest.mark.parametrize("bad", [[1.0], [0.5, -1.0], [0.2, float("nan")]])
    def test_rejects_out_of_range(self, bad):
        with pytest.raises(InvalidAcfError):
            AcfSequence(bad)

    def test_rejects_unknown_policy(self):
        with pytest.raises(DomainError):
            AcfSequence([0.5], "spline")

    def test_divergent_geometric_tail_rejected(self):
        with pytest.raises(InvalidAcfError, match="divergent"):
            AcfSequence([0.4, 0.5], "geometric_extrapolate")

    def test_negative_ratio_falls_back_to_truncation(self):
        acf = AcfSequence([0.5, -0.1], "geometric_extrapolate")
        assert acf.tail_ratio is None

    def test_single_lag_ratio_uses_lag_zero(self):
        acf = AcfSequence([0.3], "geometric_extrapolate")
        assert acf.tail_ratio == pytest.approx(0.3)

    def test_ar1_constructor(self):
        acf = AcfSequence.ar1(0.5, 3)
        np.testing.assert_allclose(acf.values, [0.5, 0.25, 0.125])
        assert len(acf) == 3
        assert acf.to_dict() == {"values": [0.5, 0.25, 0.125], "tail_policy": "truncate"}


class TestSums:
    def test_zero_acf(self):
        s = acf_sums(AcfSequence(np.zeros(10)), 3)
        assert (s.R, s.R_k, s.R_minus_k) == (0.0, 0.0, 0.0)

    def test_geometric_series(self):
        assert acf_sums(geometric(0.5, 200), 1).R == pytest.approx(1.0, rel=1e-12)

    def test_subseries(self):
        s = acf_sums(geometric(0.9, 500), 3)
        assert s.R_k == pytest.approx(0.9 ** 3 / (1 - 0.9 ** 3), rel=1e-12)

    def test_decomposition_exact(self, rng):
        for _ in range(200):
            acf = random_acf(rng)
            s = acf_sums(acf, int(rng.integers(1, 20)))
            assert s.R == s.R_k + s.R_minus_k

    def test_geometric_tail_matches_long_truncation(self):
        short = geometric(0.9, 5, "geometric_extrapolate")
        long = geometric(0.9, 2000)
        for k in [1, 2, 3, 4, 7, 10]:
            a, b = acf_sums(short, k), acf_sums(long, k)
            assert a.R == pytest.approx(b.R, rel=1e-10)
            assert a.R_k == pytest.approx(b.R_k, rel=1e-10)
            assert a.R_minus_k == pytest.approx(b.R_minus_k, rel=1e-10)

    def test_geometric_tail_with_single_lag(self):
        s = acf_sums(AcfSequence([0.5], "geometric_extrapolate"), 2)
        assert s.R == pytest.approx(1.0, rel=1e-12)
        assert s.R_k == pytest.approx(0.25 / 0.75, rel=1e-12)


class TestEfford:
    def test_zero_acf(self):
        assert efford(3, AcfSequence(np.zeros(5)), 1.0) == pytest.approx(0.5)

    def test_table_values(self):
        assert efford(39, geometric(0.99, 5000), 1.0) == pytest.approx(1.93, abs=0.01)
        assert efford(17, geometric(0.9, 1000), 10.0) == pytest.approx(5.53, abs=0.01)

    def test_matches_ar1_closed_form(self):
        for rho in [0.1, 0.5, 0.9]:
            L = int(math.ceil(math.log(1e-12 * (1 - rho)) / math.log(rho)))
            acf = geometric(rho, L)
            for theta in [0.1, 1.0, 10.0]:
                p = ThinningProblem(theta, rho)
                for k in range(1, 51):
                    assert efford(k, acf, theta) == pytest.approx(eff(k, p), rel=1e-8)

    def test_non_positive_variance_rejected(self):
        with pytest.raises(InvalidAcfError):
            efford(2, AcfSequence([-0.9, -0.9]), 1.0)

    def test_ratio(self):
        acf = geometric(0.9, 1000)
        assert efford_ratio(17, 1, acf, 10.0) == pytest.approx(efford(17, acf, 10.0))
        assert efford_ratio(5, 17, acf, 10.0) == pytest.approx(
            efford(5, acf, 10.0) / efford(17, acf, 10.0))


class TestFiniteBudget:
    def test_counts_only(self):
        zero = AcfSequence(np.zeros(3))
        assert efford_finite_budget(4, zero, 1.0, Budget(10)) == pytest.approx(0.4)

    def test_zero_sample(self):
        with pytest.raises(ZeroSampleError):
            efford_finite_budget(4, AcfSequence([0.0]), 1.0, Budget(3))
        with pytest.raises(ZeroSampleError):
            efford_finite_budget(1, AcfSequence([0.0]), 1.0, Budget(1.5))

    def test_converges_to_asymptotic(self):
        acf = geometric(0.9, 1000)
        b = Budget(1e9 * (17 + 10))
        assert efford_finite_budget(17, acf, 10.0, b) == pytest.approx(
            efford(17, acf, 10.0), rel=1e-6)

    def test_budget_validation(self):
        for bad in [0, -1, float("inf")]:
            with pytest.raises(DomainError):
                Budget(bad)

    def test_n_samples(self):
        assert n_samples(4, 1.0, Budget(10)) == 2
        assert n_samples(1, 1.0, Budget(10)) == 5


class TestThinningHurts:
    def test_zero_acf(self):
        zero = AcfSequence(np.zeros(5))
        assert all(thinning_hurts(k, zero, 1.0) for k in range(2, 10))

    def test_slow_decay(self):
        assert not thinning_hurts(8, geometric(0.99, 5000), 1.0)

    def test_needs_k_at_least_two(self):
        with pytest.raises(DomainError):
            thinning_hurts(1, geometric(0.5, 10), 1.0)

    def test_equivalent_to_efford_below_one(self, rng):
        checked = 0
        while checked < 500:
            acf = random_acf(rng)
            k = int(rng.integers(2, 15))
            theta = 10 ** rng.uniform(-3, 3)
            s = acf_sums(acf, k)
            if 1 + 2 * s.R_k <= 0 or 1 + 2 * s.R <= 0:
                continue
            value = efford(k, acf, theta)
            if abs(value - 1) < 1e-9:
                continue
            assert thinning_hurts(k, acf, theta) == (value < 1)
            checked += 1


class TestMonotoneBound:
    def test_geometric(self):
        assert monotone_theta_bound(geometric(0.9, 2000), 2) == pytest.approx(
            0.19 / (2 * 0.81), rel=1e-10)

    def test_no_constraint_when_rk_zero(self):
        assert monotone_theta_bound(AcfSequence([0.5]), 2) == math.inf

    def test_rejects_non_monotone(self):
        with pytest.raises(InvalidAcfError):
            monotone_theta_bound(AcfSequence([0.3, 0.5]), 2)
        with pytest.raises(InvalidAcfError):
            monotone_theta_bound(AcfSequence([0.3, -0.1]), 2)

    def test_bound_guarantees_no_loss(self, rng):
        checked = 0
        while checked < 500:
            acf = random_monotone_acf(rng)
            k = int(rng.integers(2, 20))
            bound = monotone_theta_bound(acf, k)
            if math.isinf(bound):
                continue
            theta = bound * (1 + rng.uniform(0, 3))
            assert efford(k, acf, theta) >= 1 - 1e-12
            checked += 1


class TestEstimation:
    def test_iid_small_correlations(self, rng):
        rho = sample_acf(rng.standard_normal(100_000), 50)
        assert np.all(np.abs(rho) < 0.02)

    def test_ar1_lag_one(self):
        acf = estimate_acf(generate_ar1(0.9, 200_000, seed=11), 200)
        assert 0.89 <= fit_ar1_rho(acf) <= 0.91
        assert len(acf) > 10

    def test_close_to_one(self):
        acf = estimate_acf(generate_ar1(0.99, 1_000_000, seed=3), 1000)
        assert fit_ar1_rho(acf) == pytest.approx(0.99, abs=0.01)

    def test_matches_direct_sum(self, rng):
        y = rng.standard_normal(500)
        z = y - y.mean()
        direct = [np.dot(z[:-l], z[l:]) / np.dot(z, z) for l in range(1, 6)]
        np.testing.assert_allclose(sample_acf(y, 5), direct, atol=1e-12)

    def test_truncates_at_first_nonpositive_pair(self):
        y = np.tile([1.0, -1.0], 500)
        acf = estimate_acf(y, 10)
        assert len(acf) == 1
        assert acf.values[0] < 0

    def test_constant_series(self):
        with pytest.raises(InvalidAcfError, match="zero variance"):
            estimate_acf(np.full(5000, 3.3), 10)

    def test_too_short(self):
        with pytest.raises(InvalidAcfError):
            estimate_acf(np.arange(10.0), 10)

    def test_fit_examples(self):
        assert fit_ar1_rho(AcfSequence([0.9, 0.81, 0.729])) == 0.9
        assert fit_ar1_rho(AcfSequence([0.0])) == 0.0
