import math

import numpy as np
import pytest
from scipy import stats

from glkern.processes import (ProcessSpec, RegressionSample, TruncatedNormal,
                              bump_line, generate_sample, sample_autocorrelation,
                              simulate_ar1, transform_to_x)


class TestProcessSpec:
    def test_latent_variance(self):
        spec = ProcessSpec(phi=0.75, rho=1.0)
        assert spec.latent_variance == pytest.approx(1.0 / (1.0 - 0.5625))

    @pytest.mark.parametrize("phi", [1.0, -1.0, 1.2])
    def test_nonstationary_rejected(self, phi):
        with pytest.raises(ValueError):
            ProcessSpec(phi=phi)

    def test_bad_scale_rejected(self):
        with pytest.raises(ValueError):
            ProcessSpec(rho=0.0)
        with pytest.raises(ValueError):
            ProcessSpec(c=-1.0)


class TestSimulateAr1:
    def test_stationary_variance(self):
        z = simulate_ar1(ProcessSpec(phi=0.75, rho=1.0), 10**6, seed=11)
        assert z.var() == pytest.approx(1.0 / (1.0 - 0.5625), rel=0.02)

    def test_iid_case_uncorrelated(self):
        z = simulate_ar1(ProcessSpec(phi=0.0, rho=1.0), 10**6, seed=12)
        assert abs(sample_autocorrelation(z, 1)[0]) < 0.005

    def test_deterministic(self):
        spec = ProcessSpec()
        a = simulate_ar1(spec, 500, seed=99)
        b = simulate_ar1(spec, 500, seed=99)
        assert np.array_equal(a, b)

    def test_autocorrelation_matches_phi_powers(self):
        # lag-k correlation of the latent chain is phi^k; allow three
        # Bartlett standard errors at each lag
        n = 10**6
        phi = 0.75
        z = simulate_ar1(ProcessSpec(phi=phi), n, seed=13)
        acf = sample_autocorrelation(z, 10)
        for k in range(1, 11):
            var_sum = 1.0 + 2.0 * np.sum(acf[:k - 1] ** 2) if k > 1 else 1.0
            se = math.sqrt(var_sum / n)
            assert abs(acf[k - 1] - phi**k) < 3 * se + 5e-4

    def test_length_validated(self):
        with pytest.raises(ValueError):
            simulate_ar1(ProcessSpec(), 0, seed=1)


class TestTruncatedNormal:
    def test_symmetry_of_median(self):
        assert TruncatedNormal(2.0).quantile(0.5) == pytest.approx(0.0, abs=1e-12)

    def test_pdf_at_zero(self):
        # phi(0)/p with p = Phi(2) - Phi(-2), against an independent oracle
        tn = TruncatedNormal(2.0)
        oracle = stats.truncnorm(-2.0, 2.0)
        assert tn.pdf(0.0) == pytest.approx(0.4179, abs=1e-4)
        assert tn.pdf(0.0) == pytest.approx(oracle.pdf(0.0), abs=1e-12)

    def test_cdf_endpoints(self):
        tn = TruncatedNormal(2.0)
        assert tn.cdf(2.0) == 1.0
        assert tn.cdf(-2.0) == 0.0

    def test_quantile_domain_checked(self):
        tn = TruncatedNormal(2.0)
        with pytest.raises(ValueError):
            tn.quantile(1.5)
        with pytest.raises(ValueError):
            tn.quantile(-0.1)

    def test_matches_scipy_truncnorm(self):
        tn = TruncatedNormal(1.5)
        oracle = stats.truncnorm(-1.5, 1.5)
        xs = np.linspace(-1.5, 1.5, 41)
        assert tn.pdf(xs) == pytest.approx(oracle.pdf(xs), abs=1e-12)
        assert tn.cdf(xs) == pytest.approx(oracle.cdf(xs), abs=1e-12)
        us = np.linspace(0.01, 0.99, 21)
        assert tn.quantile(us) == pytest.approx(oracle.ppf(us), abs=1e-9)

    def test_quantile_closed_endpoints(self):
        tn = TruncatedNormal(2.0)
        assert tn.quantile(0.0) == pytest.approx(-2.0, abs=1e-9)
        assert tn.quantile(1.0) == pytest.approx(2.0, abs=1e-9)


class TestTransform:
    def test_zero_maps_to_zero(self):
        assert transform_to_x(np.array([0.0]), ProcessSpec())[0] == pytest.approx(0.0, abs=1e-12)

    def test_kolmogorov_smirnov_against_cdf(self):
        spec = ProcessSpec()
        z = simulate_ar1(spec, 10**5, seed=21)
        x = transform_to_x(z, spec)
        stat = stats.kstest(x, TruncatedNormal(spec.c).cdf).statistic
        assert stat < 0.01

    def test_monotone(self):
        spec = ProcessSpec()
        z = np.linspace(-4, 4, 101)
        x = transform_to_x(z, spec)
        assert np.all(np.diff(x) > 0)

    def test_output_in_support(self):
        spec = ProcessSpec(c=2.0)
        z = simulate_ar1(spec, 10**4, seed=22)
        x = transform_to_x(z, spec)
        assert np.all(np.abs(x) <= 2.0)

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            transform_to_x(np.array([]), ProcessSpec())

    def test_histogram_goodness_of_fit(self):
        # the chain is dependent, which miscalibrates a plain chi-square;
        # thin to lag 25 (latent correlation 0.75^25 < 1e-3) so the test
        # sees effectively independent draws of the same marginal
        spec = ProcessSpec()
        x = transform_to_x(simulate_ar1(spec, 10**5, seed=23), spec)[::25]
        tn = TruncatedNormal(spec.c)
        edges = np.linspace(-2.0, 2.0, 21)
        observed, _ = np.histogram(x, bins=edges)
        expected = np.diff(tn.cdf(edges)) * len(x)
        p_value = stats.chisquare(observed, expected).pvalue
        assert p_value > 0.001


class TestGenerateSample:
    def test_noiseless_responses_exact(self):
        sample = generate_sample(ProcessSpec(), bump_line, 0.0, 200, seed=31)
        assert np.array_equal(sample.y, bump_line(sample.x))

    def test_regression_function_peak(self):
        assert bump_line(0.0) == pytest.approx(2.0)

    def test_noise_mean_clt(self):
        sigma = 0.7
        sample = generate_sample(ProcessSpec(), bump_line, sigma, 10**6, seed=32)
        noise_mean = np.mean(sample.y - bump_line(sample.x))
        assert abs(noise_mean) < 3 * sigma / 10**3

    def test_negative_sigma_rejected(self):
        with pytest.raises(ValueError):
            generate_sample(ProcessSpec(), bump_line, -0.1, 10, seed=1)

    def test_reproducible(self):
        a = generate_sample(ProcessSpec(), bump_line, 0.5, 300, seed=77)
        b = generate_sample(ProcessSpec(), bump_line, 0.5, 300, seed=77)
        assert np.array_equal(a.x, b.x) and np.array_equal(a.y, b.y)

    def test_noise_independent_of_design_stream(self):
        # same seed, different sigma: identical design path
        a = generate_sample(ProcessSpec(), bump_line, 0.1, 300, seed=78)
        b = generate_sample(ProcessSpec(), bump_line, 1.0, 300, seed=78)
        assert np.array_equal(a.x, b.x)
        assert not np.array_equal(a.y, b.y)


class TestSampleAutocorrelation:
    def test_constant_series_rejected(self):
        with pytest.raises(ValueError):
            sample_autocorrelation(np.full(100, 3.14), 5)

    def test_iid_nearly_uncorrelated(self):
        x = np.random.default_rng(41).standard_normal(10**5)
        assert abs(sample_autocorrelation(x, 1)[0]) < 0.01

    def test_transformed_chain_decays_geometrically(self):
        spec = ProcessSpec(phi=0.75)
        x = transform_to_x(simulate_ar1(spec, 10**5, seed=42), spec)
        acf = sample_autocorrelation(x, 20)
        assert acf[0] > acf[4] > acf[19] > 0.0

    def test_short_series_rejected(self):
        with pytest.raises(ValueError):
            sample_autocorrelation(np.arange(5.0), 5)


class TestRegressionSample:
    def test_length_mismatch_rejected(self):
        with pytest.raises(ValueError):
            RegressionSample(x=np.arange(3.0), y=np.arange(4.0))

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            RegressionSample(x=np.array([]), y=np.array([]))
