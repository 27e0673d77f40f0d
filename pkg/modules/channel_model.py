#!/usr/bin/env python3

from dataclasses import dataclass

import numpy as np

from .utility_functions import ConfigurationError, DomainError, complex_normal


@dataclass(frozen=True)
class PathSet:
    """Path gains and normalized spatial frequencies of one channel draw"""
    gains_g: np.ndarray     # alpha_l, length L
    gains_h: np.ndarray     # beta_j, length J
    aod_bs: np.ndarray      # BS-side frequencies of G, length L
    aod_ris: np.ndarray     # RIS-side frequencies of G, length L
    aoa_ris: np.ndarray     # RIS-side frequencies of h, length J


@dataclass(frozen=True)
class ChannelRealization:
    G: np.ndarray           # N x M
    h: np.ndarray           # M
    U: np.ndarray           # N x M cascaded channel G Diag(h)
    paths: PathSet


def steering_vector(n_elems, freq):
    """ULA response exp(j*2*pi*freq*k), k = 0..n_elems-1, for freq in (0, 1]"""
    if n_elems < 1:
        raise ConfigurationError(f"steering vector needs at least one element, got {n_elems}")
    if not 0.0 < freq <= 1.0:
        raise DomainError(f"normalized spatial frequency must lie in (0, 1], got {freq}")
    return np.exp(2j * np.pi * freq * np.arange(n_elems))


def wrap_frequency(freq):
    """Map any real frequency into (0, 1]; the ULA response has period 1"""
    wrapped = np.mod(freq, 1.0)
    return np.where(wrapped == 0.0, 1.0, wrapped)


def _uniform_open_closed(rng, size):
    # rng.random() is on [0, 1), so 1 - x is on (0, 1]
    return 1.0 - rng.random(size)


def sample_paths(cfg, rng):
    """Draw CN(0, sigma^2) path gains and uniform (0, 1] spatial frequencies"""
    L, J = cfg.num_paths_g, cfg.num_paths_h
    if L < 1 or J < 1:
        raise ConfigurationError(f"path counts must be >= 1, got L={L}, J={J}")

    return PathSet(
        gains_g=complex_normal(rng, L, cfg.sigma_g2),
        gains_h=complex_normal(rng, J, cfg.sigma_h2),
        aod_bs=_uniform_open_closed(rng, L),
        aod_ris=_uniform_open_closed(rng, L),
        aoa_ris=_uniform_open_closed(rng, J),
    )


def _check_paths(paths, cfg):
    L, J = cfg.num_paths_g, cfg.num_paths_h
    if not (len(paths.gains_g) == len(paths.aod_bs) == len(paths.aod_ris) == L):
        raise ConfigurationError(f"PathSet has {len(paths.gains_g)} G paths, config declares L={L}")
    if not (len(paths.gains_h) == len(paths.aoa_ris) == J):
        raise ConfigurationError(f"PathSet has {len(paths.gains_h)} h paths, config declares J={J}")


def build_channels(paths, cfg):
    """Build G = sum alpha a_N a_M^H, h = sum beta a_M and U = G Diag(h)"""
    _check_paths(paths, cfg)
    N, M = cfg.num_antennas, cfg.num_elements

    G = np.zeros((N, M), dtype=complex)
    for alpha, f_bs, f_ris in zip(paths.gains_g, paths.aod_bs, paths.aod_ris):
        G += alpha * np.outer(steering_vector(N, f_bs), steering_vector(M, f_ris).conj())

    h = np.zeros(M, dtype=complex)
    for beta, f_user in zip(paths.gains_h, paths.aoa_ris):
        h += beta * steering_vector(M, f_user)

    U = G * h[np.newaxis, :]
    return ChannelRealization(G=G, h=h, U=U, paths=paths)


def cascaded_from_paths(paths, num_antennas, num_elements):
    """Cascaded channel from the double sum over (l, j) with a_M^H(phi_l - psi_j)"""
    U = np.zeros((num_antennas, num_elements), dtype=complex)
    for alpha, f_bs, f_ris in zip(paths.gains_g, paths.aod_bs, paths.aod_ris):
        bs_response = steering_vector(num_antennas, f_bs)
        for beta, f_user in zip(paths.gains_h, paths.aoa_ris):
            ris_response = steering_vector(num_elements, float(wrap_frequency(f_ris - f_user)))
            U += alpha * beta * np.outer(bs_response, ris_response.conj())
    return U


def numerical_rank(matrix, rel_tol=1e-8):
    """Count singular values above rel_tol times the largest one"""
    singular_values = np.linalg.svd(matrix, compute_uv=False)
    if singular_values.size == 0 or singular_values[0] == 0.0:
        return 0
    return int(np.sum(singular_values > rel_tol * singular_values[0]))


def entry_variances(cfg):
    """Per-entry variances of G and h implied by the path model: (L s_g^2, J s_h^2)"""
    return cfg.num_paths_g * cfg.sigma_g2, cfg.num_paths_h * cfg.sigma_h2


def prior_variance(cfg, rule=None):
    """Gaussian prior variance of a cascaded-channel entry u = g h

    'product' matches the second moment of the generative model; 'harmonic'
    is the var_g var_h / (var_g + var_h) form used by the ALMMSE benchmark.
    """
    var_g, var_h = entry_variances(cfg)
    rule = rule or cfg.prior_rule
    if rule == 'product':
        return var_g * var_h
    if rule == 'harmonic':
        return var_g * var_h / (var_g + var_h)
    raise ConfigurationError(f"Unknown prior rule '{rule}'")
