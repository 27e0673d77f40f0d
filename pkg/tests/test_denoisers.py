import math

import numpy as np
import pytest
from scipy import integrate, stats

from modules.denoisers import (GaussianBelief, gaussian_prior_denoiser, quantized_posterior,
                               quantized_posterior_parts, truncated_normal_moments,
                               unquantized_posterior)
from modules.quantizer import bin_limits
from modules.utility_functions import DomainError


def truncated_oracle(lower, upper):
    """Truncated standard normal moments by quadrature, weights rescaled at the nearest edge"""
    anchor = min(max(0.0, lower), upper)
    weight = lambda x: math.exp(-0.5 * (x * x - anchor * anchor))
    mass = integrate.quad(weight, lower, upper, epsabs=0, epsrel=1e-12)[0]
    mean = integrate.quad(lambda x: x * weight(x), lower, upper, epsabs=0, epsrel=1e-12)[0] / mass
    var = integrate.quad(lambda x: (x - mean) ** 2 * weight(x), lower, upper,
                         epsabs=0, epsrel=1e-12)[0] / mass
    return mean, var


def posterior_oracle(mean, part_var, lower, upper, noise_var):
    """Posterior of z ~ N(mean, part_var) given Q(z + n) in (lower, upper], n ~ N(0, noise_var/2)"""
    sd = math.sqrt(part_var)
    noise_sd = math.sqrt(noise_var / 2.0)
    a, b = mean - 12.0 * sd, mean + 12.0 * sd
    points = [p for p in (lower, upper) if a < p < b]

    def weight(z):
        likelihood = stats.norm.cdf((upper - z) / noise_sd) - stats.norm.cdf((lower - z) / noise_sd)
        return stats.norm.pdf(z, mean, sd) * likelihood

    opts = dict(epsabs=0, epsrel=1e-11, limit=200, points=points or None)
    mass = integrate.quad(weight, a, b, **opts)[0]
    post_mean = integrate.quad(lambda z: z * weight(z), a, b, **opts)[0] / mass
    post_var = integrate.quad(lambda z: (z - post_mean) ** 2 * weight(z), a, b, **opts)[0] / mass
    return post_mean, post_var


@pytest.mark.parametrize('lower, upper', [
    (-math.inf, math.inf), (-1.0, 2.0), (0.5, 1.5), (-math.inf, -8.0), (7.0, math.inf),
    (-3.0, -2.5), (2.0, math.inf), (-math.inf, 0.0), (-20.0, -19.0),
])
def test_truncated_moments_match_quadrature(lower, upper):
    mean, var = truncated_normal_moments(lower, upper)
    expected_mean, expected_var = truncated_oracle(lower, upper)
    assert float(mean) == pytest.approx(expected_mean, abs=1e-6)
    assert float(var) == pytest.approx(expected_var, abs=1e-6)


def test_truncated_moments_stay_finite_deep_in_the_tail():
    lower = np.array([-40.0, 39.0, -math.inf, 200.0])
    upper = np.array([-39.0, 40.0, -60.0, math.inf])
    mean, var = truncated_normal_moments(lower, upper)
    assert np.all(np.isfinite(mean)) and np.all(np.isfinite(var))
    assert np.all(mean >= lower) and np.all(mean <= upper)
    assert np.all((var >= 0.0) & (var <= 1.0))


def random_cases(count, seed):
    rng = np.random.default_rng(seed)
    for _ in range(count):
        bits = int(rng.integers(1, 4))
        scale = 0.5 + rng.random()
        mean = rng.normal(0.0, 1.5)
        part_var = 0.05 + 2.0 * rng.random()
        noise_var = 0.02 + rng.random()
        # Draw a realistic observation so the bin carries non-negligible mass
        y = mean + rng.normal(0.0, math.sqrt(part_var)) + rng.normal(0.0, math.sqrt(noise_var / 2.0))
        half_levels = 2 ** (bits - 1)
        index = int(np.clip(math.ceil(y / scale) + half_levels, 1, 2 * half_levels))
        lower, upper = bin_limits(index, scale, bits)
        yield mean, part_var, float(lower), float(upper), noise_var


@pytest.mark.parametrize('seed', [11, 12])
def test_quantized_posterior_matches_quadrature(seed):
    for mean, part_var, lower, upper, noise_var in random_cases(50, seed):
        got_mean, got_var = quantized_posterior_parts(mean, part_var, lower, upper, noise_var)
        want_mean, want_var = posterior_oracle(mean, part_var, lower, upper, noise_var)
        assert float(got_mean) == pytest.approx(want_mean, abs=1e-6)
        assert float(got_var) == pytest.approx(want_var, abs=1e-6)


@pytest.mark.slow
def test_quantized_posterior_matches_quadrature_thousand_cases():
    for mean, part_var, lower, upper, noise_var in random_cases(1000, 2024):
        got_mean, got_var = quantized_posterior_parts(mean, part_var, lower, upper, noise_var)
        want_mean, want_var = posterior_oracle(mean, part_var, lower, upper, noise_var)
        assert float(got_mean) == pytest.approx(want_mean, abs=1e-6)
        assert float(got_var) == pytest.approx(want_var, abs=1e-6)


def test_belief_variance_is_split_between_parts():
    belief = GaussianBelief(mean=0.3, variance=2.0)
    posterior = quantized_posterior(belief, 0.5, (0.0, 1.0), 0.4)
    want_mean, want_var = posterior_oracle(0.3, 1.0, 0.0, 1.0, 0.4)
    assert posterior.mean == pytest.approx(want_mean, abs=1e-6)
    assert posterior.variance == pytest.approx(want_var, abs=1e-6)


def test_posterior_variance_never_exceeds_prior():
    for mean, part_var, lower, upper, noise_var in random_cases(100, 3):
        _, post_var = quantized_posterior_parts(mean, part_var, lower, upper, noise_var)
        assert 0.0 <= post_var <= part_var


def test_huge_noise_leaves_prior_unchanged():
    posterior = quantized_posterior(GaussianBelief(0.2, 1.0), 0.5, (0.0, 1.0), 1e12)
    assert posterior.mean == pytest.approx(0.2, abs=1e-5)
    assert posterior.variance == pytest.approx(0.5, abs=1e-5)


def test_unbounded_bin_with_infinite_limits_is_prior():
    mean, var = quantized_posterior_parts(0.7, 0.4, -math.inf, math.inf, 0.1)
    assert float(mean) == pytest.approx(0.7)
    assert float(var) == pytest.approx(0.4)


def test_quantized_posterior_domain_checks():
    belief = GaussianBelief(0.0, 1.0)
    with pytest.raises(DomainError):
        quantized_posterior(belief, 0.5, (0.0, 1.0), 0.0)
    with pytest.raises(DomainError):
        quantized_posterior(belief, 1.5, (0.0, 1.0), 0.1)


def test_unquantized_posterior_is_conjugate_update():
    posterior = unquantized_posterior(GaussianBelief(1.0, 2.0), 3.0, 2.0)
    # part prior N(1, 1), part noise variance 1
    assert posterior.mean == pytest.approx(2.0)
    assert posterior.variance == pytest.approx(0.5)


def test_gaussian_prior_denoiser_shrinks():
    u_hat, u_var = gaussian_prior_denoiser(np.array([2.0 + 2.0j]), np.array([1.0]), 1.0)
    np.testing.assert_allclose(u_hat, [1.0 + 1.0j])
    np.testing.assert_allclose(u_var, [0.5])


@pytest.mark.parametrize('bits, prior_mean', [(1, 0.4), (3, -0.7)])
def test_posterior_mean_averages_back_to_the_prior(bits, prior_mean):
    """Tower property: E[E[z | bin]] = E[z], and the variance splits by total variance"""
    rng = np.random.default_rng(bits)
    count, part_var, noise_var, scale = 100_000, 0.8, 0.3, 0.9
    z = prior_mean + math.sqrt(part_var) * rng.standard_normal(count)
    y = z + math.sqrt(noise_var / 2.0) * rng.standard_normal(count)
    half_levels = 2 ** (bits - 1)
    index = np.clip(np.ceil(y / scale) + half_levels, 1, 2 * half_levels).astype(int)
    lower, upper = bin_limits(index, scale, bits)

    post_mean, post_var = quantized_posterior_parts(prior_mean, part_var, lower, upper, noise_var)
    stderr = np.std(post_mean) / math.sqrt(count)
    assert abs(np.mean(post_mean) - prior_mean) <= 3.0 * stderr
    assert np.mean(post_var) + np.var(post_mean) == pytest.approx(part_var, rel=0.02)


def test_quantized_posterior_with_vanishing_prior_variance_returns_prior_mean():
    posterior = quantized_posterior(GaussianBelief(0.3, 1e-10), 0.5, (0.0, 1.0), 0.1)
    assert posterior.mean == pytest.approx(0.3, abs=1e-6)
    assert 0.0 <= posterior.variance <= 1e-10


def test_gaussian_prior_denoiser_uninformative_observation_returns_prior():
    u_hat, u_var = gaussian_prior_denoiser(np.array([3.0 - 1.0j]), np.array([1e12]), 2.0)
    assert abs(u_hat[0]) < 1e-10
    assert u_var[0] == pytest.approx(2.0, rel=1e-9)


@pytest.mark.parametrize('q_hat, q_var, prior_var', [(1.5 - 0.4j, 0.7, 2.0), (-3.0 + 2.0j, 4.0, 0.5)])
def test_gaussian_prior_denoiser_matches_quadrature(q_hat, q_var, prior_var):
    # Circular symmetry: Re and Im are independent N(0, prior_var/2) parts in N(0, q_var/2) noise
    def part_moments(observed):
        weight = lambda u: (stats.norm.pdf(u, 0.0, math.sqrt(prior_var / 2.0))
                            * stats.norm.pdf(observed, u, math.sqrt(q_var / 2.0)))
        edge = 12.0 * math.sqrt(prior_var / 2.0)
        opts = dict(epsabs=0, epsrel=1e-12, limit=200, points=[0.0])
        mass = integrate.quad(weight, -edge, edge, **opts)[0]
        mean = integrate.quad(lambda u: u * weight(u), -edge, edge, **opts)[0] / mass
        var = integrate.quad(lambda u: (u - mean) ** 2 * weight(u), -edge, edge, **opts)[0] / mass
        return mean, var

    mean_re, var_re = part_moments(q_hat.real)
    mean_im, var_im = part_moments(q_hat.imag)
    u_hat, u_var = gaussian_prior_denoiser(np.array([q_hat]), np.array([q_var]), prior_var)
    assert u_hat[0].real == pytest.approx(mean_re, abs=1e-8)
    assert u_hat[0].imag == pytest.approx(mean_im, abs=1e-8)
    assert u_var[0] == pytest.approx(var_re + var_im, abs=1e-8)
