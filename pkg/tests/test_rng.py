import math

import numpy as np
import pytest
from scipy import stats

from levysim import rng
from levysim.errors import DomainError, SamplerFailure
from levysim.models import Meixner, gig_density
from levysim.rng import RngStream
from levysim.specfun import bessel_k
from levysim.validate import chi_square_counts, ks_against_cdf, ks_against_density, ks_two_sample

N = 100_000


def ig_cdf(x, mu, lam):
    x = np.asarray(x)
    a = np.sqrt(lam / x)
    return stats.norm.cdf(a * (x / mu - 1)) + np.exp(2 * lam / mu) * stats.norm.cdf(-a * (x / mu + 1))


class TestStreams:
    def test_determinism(self):
        a = rng.sample_normal(RngStream(11, 3), 50)
        b = rng.sample_normal(RngStream(11, 3), 50)
        assert np.array_equal(a, b)

    def test_distinct_streams_differ_and_are_uncorrelated(self):
        a = rng.sample_normal(RngStream(11, 0), N)
        b = rng.sample_normal(RngStream(11, 1), N)
        assert not np.array_equal(a, b)
        assert abs(np.corrcoef(a, b)[0, 1]) < 4 / math.sqrt(N)

    def test_bad_seed(self):
        with pytest.raises(DomainError):
            RngStream(-1)

    def test_uniform_open_interval(self):
        u = rng.sample_uniform(RngStream(1), N)
        assert u.min() > 0 and u.max() < 1
        assert isinstance(rng.sample_uniform(RngStream(1)), float)


class TestElementary:
    def test_binomial_zero_trials(self):
        assert np.all(rng.sample_binomial(0, 0.3, RngStream(2), 100) == 0)

    def test_gamma_mean(self):
        x = rng.sample_gamma(2.0, 4.0, RngStream(3), N)
        assert abs(x.mean() - 0.5) < 0.01

    def test_exponential_mean(self):
        x = rng.sample_exponential(1.0, RngStream(4), N)
        assert abs(x.mean() - 1.0) < 0.01

    @pytest.mark.parametrize("call", [
        lambda s: rng.sample_gamma(-1.0, 1.0, s),
        lambda s: rng.sample_gamma(1.0, 0.0, s),
        lambda s: rng.sample_exponential(0.0, s),
        lambda s: rng.sample_binomial(-1, 0.5, s),
        lambda s: rng.sample_binomial(3, 1.5, s),
        lambda s: rng.sample_poisson_count(-0.1, s),
        lambda s: rng.sample_inverse_gaussian(0.0, 1.0, s),
        lambda s: rng.sample_gig(0.5, 0.0, 1.0, s),
        lambda s: rng.sample_meixner_increment(0.0, 1.0, 0.0, 1.0, s),
    ])
    def test_domain_errors(self, call):
        with pytest.raises(DomainError):
            call(RngStream(0))


class TestPoisson:
    def test_zero_mean(self):
        assert np.all(rng.sample_poisson_count(0.0, RngStream(5), 1000) == 0)

    def test_moments(self):
        x = rng.sample_poisson_count(3.0, RngStream(6), N)
        assert abs(x.mean() - 3.0) < 0.017
        assert abs(x.var() - 3.0) < 0.05

    def test_large_mean(self):
        x = rng.sample_poisson_count(np.array([5e3, 1e12]), RngStream(8), (N, 2))
        assert abs(x[:, 0].mean() - 5e3) < 3 * math.sqrt(5e3 / N)
        assert abs(x[:, 1].mean() - 1e12) < 3 * math.sqrt(1e12 / N)
        assert x.dtype.kind == "i"

    def test_aggregation_chi_square(self):
        # 1000 steps of mean 0.1 sum to Poisson(100)
        s = RngStream(7)
        totals = rng.sample_poisson_count(0.1, s, (5000, 1000)).sum(axis=1)
        _, p = chi_square_counts(totals, lambda k: stats.poisson.pmf(k, 100))
        assert p > 0.01


class TestInverseGaussian:
    def test_mean(self):
        x = rng.sample_inverse_gaussian(1.0, 2.0, RngStream(8), N)
        assert abs(x.mean() - 1.0) < 0.021

    def test_ks(self):
        x = rng.sample_inverse_gaussian(1.0, 2.0, RngStream(9), 10_000)
        _, p = ks_against_cdf(x, lambda v: ig_cdf(v, 1.0, 2.0))
        assert p > 0.01

    def test_degenerate_limit(self):
        x = rng.sample_inverse_gaussian(1.0, 1e6, RngStream(10), 10_000)
        assert x.std() < 0.002 and abs(x.mean() - 1) < 1e-3


class TestGIG:
    def test_matches_inverse_gaussian(self):
        # GIG(-1/2, a, b) = IG(sqrt(b/a), b)
        a, b = 2.0, 3.0
        g = rng.sample_gig(-0.5, a, b, RngStream(11), 10_000)
        ig = rng.sample_inverse_gaussian(math.sqrt(b / a), b, RngStream(12), 10_000)
        assert ks_two_sample(g, ig)[1] > 0.01

    @pytest.mark.parametrize("p,a,b", [(1.0, 3.0, 2.25), (-2.3, 1.0, 0.5), (0.3, 0.5, 0.5), (5.0, 1.0, 8.0)])
    def test_mean(self, p, a, b):
        x = rng.sample_gig(p, a, b, RngStream(13), N)
        w = math.sqrt(a * b)
        mean = math.sqrt(b / a) * bessel_k(p + 1, w) / bessel_k(p, w)
        assert abs(x.mean() - mean) < 3 * x.std() / math.sqrt(N)

    @pytest.mark.parametrize("p,a,b", [(1.0, 3.0, 2.25), (-0.7, 0.2, 4.0)])
    def test_ks_against_density(self, p, a, b):
        x = rng.sample_gig(p, a, b, RngStream(14), 10_000)
        _, pval = ks_against_density(x, lambda v: gig_density(v, p, a, b), support=(0, np.inf))
        assert pval > 0.01

    def test_reciprocal_symmetry(self):
        x = rng.sample_gig(1.5, 2.0, 0.7, RngStream(15), 10_000)
        y = rng.sample_gig(-1.5, 0.7, 2.0, RngStream(16), 10_000)
        assert ks_two_sample(1.0 / x, y)[1] > 0.01


class TestMeixner:
    def test_symmetric_mean(self):
        x = rng.sample_meixner_increment(1.0, 0.5, 0.0, 4.0, RngStream(17), N)
        assert abs(x.mean()) < 3 * x.std() / math.sqrt(N)

    def test_ks_against_density(self):
        x = rng.sample_meixner_increment(1.0, 0.5, 0.0, 4.0, RngStream(18), 10_000)
        model = Meixner(0.5, 0.0, 4.0)
        _, p = ks_against_density(x, model.density)
        assert p > 0.01

    def test_variance_against_finite_difference(self):
        model = Meixner(0.5, 0.0, 4.0)
        h = 1e-5
        var = float(np.real(model.char_exponent(h) + model.char_exponent(-h))) / h**2
        x = rng.sample_meixner_increment(1.0, 0.5, 0.0, 4.0, RngStream(19), N)
        v = x.var()
        se = math.sqrt((np.mean((x - x.mean()) ** 4) - v * v) / N)
        assert abs(v - var) < 3 * se

    def test_shift_and_small_time(self):
        x = rng.sample_meixner_increment(1 / 252, 0.5, 2.0, 4.0, RngStream(20), N)
        assert abs(x.mean() - 2.0 / 252) < 3 * x.std() / math.sqrt(N)
        var = 0.25 * 4.0 / 252 / 2
        assert abs(x.var() / var - 1) < 0.05


class TestTemperedStable:
    def test_laplace_transform(self):
        x = rng.sample_tempered_stable(0.3, 2.0, 3.0, RngStream(21), N)
        for lam in (0.5, 2.0):
            target = math.exp(-2.0 * ((3.0 + lam) ** 0.3 - 3.0**0.3))
            assert abs(np.exp(-lam * x).mean() - target) < 4 / math.sqrt(N)

    def test_small_index(self):
        # the Kanter exponent (1 - a)/a is ~1e3 here; draws must stay finite and correct in law
        a, scale, tilt = 1e-3, 30.0, 2.0
        x = rng.sample_tempered_stable(a, scale, tilt, RngStream(24), 20_000)
        assert np.all(np.isfinite(x)) and np.all(x >= 0)
        lam = 1.0
        target = math.exp(-scale * ((tilt + lam) ** a - tilt**a))
        assert abs(np.exp(-lam * x).mean() - target) < 4 / math.sqrt(20_000)

    def test_piece_cap(self):
        with pytest.raises(SamplerFailure):
            rng.sample_tempered_stable(0.5, 1e6, 1.0, RngStream(25), 10)

    def test_positive_stable(self):
        x = rng.sample_positive_stable(0.5, RngStream(22), N)
        # index 1/2 is the Levy law: S = 1 / (2 Z^2) for Z standard normal, scaled to exp(-sqrt(lam))
        ref = 1.0 / (2.0 * rng.sample_normal(RngStream(23), N) ** 2)
        assert ks_two_sample(x, ref)[1] > 0.01
