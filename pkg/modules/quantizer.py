#!/usr/bin/env python3

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import integrate, optimize

from .utility_functions import (ConfigurationError, DegeneratePowerError, DomainError,
                                is_infinite_bits)

MAX_BITS = 8
STEPSIZE_TOL = 1e-6
# Geometric search grid for the stepsize; the 8-bit optimum is near 0.03
_STEP_GRID = np.geomspace(5e-3, 3.0, 48)
_INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)


@dataclass(frozen=True)
class QuantizerSpec:
    """B-bit mid-rise quantizer with AGC-scaled steps for Re and Im"""
    bits: object
    base_step: float
    scale_re: float
    scale_im: float
    thresholds: np.ndarray      # r_b in unit-variance units, length 2^B - 1
    eta_b: float

    @property
    def infinite(self):
        return is_infinite_bits(self.bits)

    @property
    def half_levels(self):
        return 2 ** (self.bits - 1)


@dataclass(frozen=True)
class QuantizedMatrix:
    values: np.ndarray
    spec: QuantizerSpec
    bin_index_re: np.ndarray = None     # None in pass-through mode
    bin_index_im: np.ndarray = None


def _check_bits(bits):
    if isinstance(bits, bool) or not isinstance(bits, (int, np.integer)) or not 1 <= bits <= MAX_BITS:
        raise ConfigurationError(f"bits must be an integer in 1..{MAX_BITS}, got {bits!r}")


def gaussian_distortion(delta, bits):
    """E[(Q(x) - x)^2] for x ~ N(0, 1) under the B-bit mid-rise rule with step delta"""
    half_levels = 2 ** (bits - 1)
    total = 0.0
    for k in range(1, half_levels + 1):
        lower = (k - 1) * delta
        upper = k * delta if k < half_levels else np.inf
        level = (k - 0.5) * delta
        value, _ = integrate.quad(lambda x: (x - level) ** 2 * _INV_SQRT_2PI * math.exp(-0.5 * x * x),
                                  lower, upper, epsabs=1e-13, epsrel=1e-11)
        total += value
    # The quantizer is odd and the density even
    return 2.0 * total


@lru_cache(maxsize=None)
def optimal_stepsize(bits):
    """Stepsize minimising the unit-variance Gaussian distortion"""
    _check_bits(bits)
    distortions = [gaussian_distortion(delta, bits) for delta in _STEP_GRID]
    best = int(np.argmin(distortions))
    lower = _STEP_GRID[max(best - 1, 0)]
    upper = _STEP_GRID[min(best + 1, len(_STEP_GRID) - 1)]
    result = optimize.minimize_scalar(lambda delta: gaussian_distortion(delta, bits),
                                      bounds=(lower, upper), method='bounded',
                                      options={'xatol': STEPSIZE_TOL})
    return float(result.x)


@lru_cache(maxsize=None)
def distortion_factor(bits):
    """Quantization NMSE eta_b at the optimal stepsize (0 for infinite resolution)"""
    if is_infinite_bits(bits):
        return 0.0
    _check_bits(bits)
    # Circular symmetry: the complex NMSE equals the per-dimension one
    return gaussian_distortion(optimal_stepsize(bits), bits)


def stepsize_table(max_bits=MAX_BITS):
    """Stepsize and eta_b for B = 1..max_bits"""
    return [
        {'bits': bits, 'stepsize': optimal_stepsize(bits), 'eta_b': distortion_factor(bits)}
        for bits in range(1, max_bits + 1)
    ]


def normalized_thresholds(bits, base_step):
    """r_b = (-2^(B-1) + b) * delta for b = 1..2^B - 1"""
    half_levels = 2 ** (bits - 1)
    return (np.arange(1, 2 * half_levels) - half_levels) * base_step


def passthrough_spec():
    return QuantizerSpec(bits=math.inf, base_step=0.0, scale_re=1.0, scale_im=1.0,
                         thresholds=np.empty(0), eta_b=0.0)


def calibrate(bits, base_step, samples):
    """AGC: scale the step by the measured RMS of the real and imaginary parts"""
    if is_infinite_bits(bits):
        return passthrough_spec()
    _check_bits(bits)
    if base_step <= 0:
        raise ConfigurationError(f"base stepsize must be positive, got {base_step}")

    samples = np.asarray(samples)
    if samples.size == 0:
        raise DegeneratePowerError("cannot calibrate the AGC on an empty sample set")
    power_re = float(np.mean(samples.real ** 2))
    power_im = float(np.mean(samples.imag ** 2))
    if power_re <= 0.0 or power_im <= 0.0:
        raise DegeneratePowerError(
            f"AGC measured zero power (Re: {power_re}, Im: {power_im})")

    return QuantizerSpec(
        bits=bits,
        base_step=float(base_step),
        scale_re=math.sqrt(power_re) * base_step,
        scale_im=math.sqrt(power_im) * base_step,
        thresholds=normalized_thresholds(bits, base_step),
        eta_b=distortion_factor(bits),
    )


def _quantize_part(x, scale, half_levels):
    # Bin b covers ((b-1-K) s, (b-K) s]; zero falls in the upper negative bin.
    # Clipping before the integer cast keeps huge inputs in the saturation bins.
    steps = np.clip(x / scale, -half_levels, half_levels)
    bins = np.clip(np.ceil(steps).astype(np.int64) + half_levels, 1, 2 * half_levels)
    levels = (bins - half_levels - 0.5) * scale
    return levels, bins


def quantize(Y, spec):
    """Mid-rise quantization of Re and Im with saturation at +-(2^(B-1) - 1/2) steps"""
    Y = np.asarray(Y, dtype=complex)
    if spec.infinite:
        return QuantizedMatrix(values=Y.copy(), spec=spec)
    if spec.scale_re <= 0 or spec.scale_im <= 0:
        raise ConfigurationError("quantizer must be calibrated before use")

    half_levels = spec.half_levels
    levels_re, bins_re = _quantize_part(Y.real, spec.scale_re, half_levels)
    levels_im, bins_im = _quantize_part(Y.imag, spec.scale_im, half_levels)
    return QuantizedMatrix(values=levels_re + 1j * levels_im, spec=spec,
                           bin_index_re=bins_re, bin_index_im=bins_im)


def bin_limits(bin_index, scale, bits):
    """Array form of bin_bounds: (lower, upper) with +-inf for the saturation bins"""
    half_levels = 2 ** (bits - 1)
    bin_index = np.asarray(bin_index)
    lower = np.where(bin_index > 1, (bin_index - 1 - half_levels) * scale, -np.inf)
    upper = np.where(bin_index < 2 * half_levels, (bin_index - half_levels) * scale, np.inf)
    return lower.astype(float), upper.astype(float)


def bin_bounds(bin_index, spec, part='re'):
    """Decision interval (lower, upper] of one bin as applied by quantize"""
    if spec.infinite:
        raise DomainError("a pass-through quantizer has no bins")
    if not 1 <= bin_index <= 2 ** spec.bits:
        raise DomainError(f"bin index {bin_index} outside 1..{2 ** spec.bits}")
    if part not in ('re', 'im'):
        raise DomainError(f"part must be 're' or 'im', got {part!r}")

    scale = spec.scale_re if part == 're' else spec.scale_im
    lower, upper = bin_limits(bin_index, scale, spec.bits)
    return float(lower), float(upper)


def empirical_nmse(samples, spec):
    """Measured E|Q(x) - x|^2 / E|x|^2 over a sample set"""
    samples = np.asarray(samples, dtype=complex)
    error = quantize(samples, spec).values - samples
    return float(np.sum(np.abs(error) ** 2) / np.sum(np.abs(samples) ** 2))
