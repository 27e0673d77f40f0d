#!/usr/bin/env python3
"""
Posterior-moment denoisers plugged into the message-passing iteration.

The complex belief CN(p, v) on z is handled as two independent real problems:
each part has prior N(Re/Im p, v / 2) and sees noise of variance sigma_w^2 / 2
before the quantizer. PosteriorMoments.variance is per real part; the complex
posterior variance is the sum over both parts.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from .utility_functions import DomainError

# Both standardized limits beyond this many deviations on the same side use
# the scaled-complementary-error-function (Mills ratio) branch
TAIL_THRESHOLD = 6.0
_LOG_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)
_SQRT_HALF_PI = math.sqrt(0.5 * math.pi)


@dataclass(frozen=True)
class GaussianBelief:
    """Real-part belief: mean of the part and the complex variance v^p of z"""
    mean: object
    variance: object

    @property
    def part_variance(self):
        return np.asarray(self.variance, dtype=float) / 2.0


@dataclass(frozen=True)
class PosteriorMoments:
    mean: object
    variance: object


def _log_pdf(x):
    return -0.5 * x * x - _LOG_SQRT_2PI


def _times_pdf(x, log_weight):
    # x * phi(x) / Z with the infinite limits contributing exactly zero
    finite = np.isfinite(x)
    safe_x = np.where(finite, x, 0.0)
    return np.where(finite, safe_x * np.exp(log_weight), 0.0)


def _central_moments(lower, upper):
    """Log-domain evaluation for limits with lower <= 0"""
    log_cdf_upper = special.log_ndtr(upper)
    log_cdf_lower = special.log_ndtr(lower)
    with np.errstate(divide='ignore', invalid='ignore'):
        log_mass = log_cdf_upper + np.log1p(-np.exp(log_cdf_lower - log_cdf_upper))
        weight_lower = _log_pdf(lower) - log_mass
        weight_upper = _log_pdf(upper) - log_mass
        mean = np.exp(weight_lower) - np.exp(weight_upper)
        edge_term = _times_pdf(upper, weight_upper) - _times_pdf(lower, weight_lower)
    return mean, 1.0 - edge_term - mean * mean


def _tail_moments(lower, upper):
    """Both limits below -TAIL_THRESHOLD: express every ratio through erfcx

    With Phi(x) = phi(x) sqrt(pi/2) erfcx(-x/sqrt 2), all ratios are taken
    relative to phi(upper), so nothing underflows.
    """
    with np.errstate(over='ignore', invalid='ignore'):
        decay = np.exp(0.5 * (upper * upper - lower * lower))   # phi(lower) / phi(upper)
        decay = np.where(np.isfinite(lower), decay, 0.0)
        mass = _SQRT_HALF_PI * (special.erfcx(-upper / math.sqrt(2.0))
                                - special.erfcx(-np.where(np.isfinite(lower), lower, 0.0)
                                                / math.sqrt(2.0)) * decay)
        mean = (decay - 1.0) / mass
        safe_lower = np.where(np.isfinite(lower), lower, 0.0)
        edge_term = (upper - safe_lower * decay) / mass
    return mean, 1.0 - edge_term - mean * mean


def truncated_normal_moments(lower, upper):
    """Mean and variance of a standard normal truncated to (lower, upper]

    Limits may be infinite. Intervals on the positive side are mirrored so the
    mass is always evaluated in the lower tail, where it is accurate.
    """
    lower, upper = np.broadcast_arrays(np.asarray(lower, dtype=float),
                                       np.asarray(upper, dtype=float))
    mirror = lower > 0.0
    lo = np.where(mirror, -upper, lower)
    hi = np.where(mirror, -lower, upper)

    tail = hi < -TAIL_THRESHOLD
    mean, var = _central_moments(lo, hi)
    if np.any(tail):
        tail_mean, tail_var = _tail_moments(lo, hi)
        mean = np.where(tail, tail_mean, mean)
        var = np.where(tail, tail_var, var)

    # Underflow fallback: mass concentrated at the edge nearest the mean
    bad = ~(np.isfinite(mean) & np.isfinite(var))
    if np.any(bad):
        with np.errstate(divide='ignore', invalid='ignore'):
            edge_mean = np.clip(hi + 1.0 / np.where(hi != 0, hi, -np.inf), lo, hi)
            width = np.where(np.isfinite(lo), hi - lo, np.inf)
            edge_var = np.minimum(1.0 / np.maximum(hi * hi, 1.0), width * width / 12.0)
        mean = np.where(bad, edge_mean, mean)
        var = np.where(bad, edge_var, var)

    var = np.clip(var, 0.0, 1.0)
    mean = np.where(mirror, -mean, mean)
    return mean, var


def quantized_posterior_parts(mean, part_var, lower, upper, noise_var):
    """Array form: posterior moments of one real part given its quantizer bin

    mean, part_var: real-part prior; lower/upper: bin limits of the observed
    output; noise_var: complex noise variance sigma_w^2.
    """
    part_var = np.asarray(part_var, dtype=float)
    spread = np.sqrt(part_var + 0.5 * noise_var)
    t_mean, t_var = truncated_normal_moments((lower - mean) / spread, (upper - mean) / spread)
    gain = part_var / spread
    post_mean = mean + gain * t_mean
    post_var = part_var - gain * gain * (1.0 - t_var)
    return post_mean, np.clip(post_var, 0.0, part_var)


def quantized_posterior(belief, observed_level, bin_bounds, noise_var):
    """Posterior mean and variance of one real part of z seen through a few-bit ADC"""
    lower, upper = bin_bounds
    if noise_var <= 0:
        raise DomainError(f"noise variance must be positive, got {noise_var}")
    if not lower < observed_level <= upper:
        raise DomainError(f"observed level {observed_level} lies outside its bin ({lower}, {upper}]")

    post_mean, post_var = quantized_posterior_parts(belief.mean, belief.part_variance,
                                                    lower, upper, noise_var)
    return PosteriorMoments(mean=float(post_mean), variance=float(post_var))


def unquantized_posterior_parts(mean, part_var, observed, noise_var):
    """Array form of the Gaussian-Gaussian conjugate update for one real part"""
    part_var = np.asarray(part_var, dtype=float)
    part_noise = 0.5 * noise_var
    gain = part_var / (part_var + part_noise)
    return mean + gain * (observed - mean), part_var * part_noise / (part_var + part_noise)


def unquantized_posterior(belief, observed, noise_var):
    """Infinite-resolution counterpart of quantized_posterior"""
    if noise_var <= 0:
        raise DomainError(f"noise variance must be positive, got {noise_var}")
    post_mean, post_var = unquantized_posterior_parts(belief.mean, belief.part_variance,
                                                      observed, noise_var)
    return PosteriorMoments(mean=float(post_mean), variance=float(post_var))


def gaussian_prior_denoiser(pseudo_obs, pseudo_var, prior_var):
    """MMSE estimate of u ~ CN(0, prior_var) from q = u + CN(0, pseudo_var)"""
    pseudo_var = np.asarray(pseudo_var, dtype=float)
    shrink = prior_var / (prior_var + pseudo_var)
    return shrink * pseudo_obs, shrink * pseudo_var
