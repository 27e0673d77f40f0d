#!/usr/bin/env python3

from dataclasses import dataclass

import numpy as np
from scipy import linalg

from .utility_functions import ConfigurationError, SingularSystemError


@dataclass(frozen=True)
class BussgangModel:
    """Linearised quantizer: Q(Y) = gain * Y + W_q with effective noise (1-eta) W + W_q"""
    gain: float
    eff_noise_var: float
    eta_b: float


def bussgang_model(eta_b, noise_var, input_power):
    """Gain 1 - eta_b and per-entry variance of the effective noise

    input_power is E|y|^2 of the quantizer input (signal plus noise); the
    distortion W_q of an MSE-optimal quantizer has variance eta (1 - eta) E|y|^2.
    """
    if not 0.0 <= eta_b < 1.0:
        raise ConfigurationError(f"eta_b must lie in [0, 1), got {eta_b}")
    if noise_var < 0 or input_power < 0:
        raise ConfigurationError("noise variance and input power must be non-negative")
    gain = 1.0 - eta_b
    eff_noise_var = gain ** 2 * noise_var + eta_b * gain * input_power
    return BussgangModel(gain=gain, eff_noise_var=eff_noise_var, eta_b=eta_b)


def _check_rank(E):
    rank = np.linalg.matrix_rank(E)
    if rank < E.shape[0]:
        raise SingularSystemError(f"training matrix has rank {rank} < M={E.shape[0]}")


def ls_estimate(Y, training):
    """U = Y E^H (E E^H)^-1, solved as the least-squares problem E^T U^T = Y^T"""
    E = training.E
    Y = np.asarray(Y)
    if Y.shape[1] != E.shape[1]:
        raise ConfigurationError(f"Y has {Y.shape[1]} columns, training length is {E.shape[1]}")
    _check_rank(E)
    solution, _, _, _ = linalg.lstsq(E.T, Y.T)
    return solution.T


def almmse_estimate(Y, training, model, noise_var, prior_var, num_antennas):
    """Ridge-regularised LS with the Bussgang gain and the eta_b N I_M loading term"""
    E = training.E
    Y = np.asarray(Y)
    if Y.shape[1] != E.shape[1]:
        raise ConfigurationError(f"Y has {Y.shape[1]} columns, training length is {E.shape[1]}")
    if prior_var <= 0:
        raise ConfigurationError(f"prior variance must be positive, got {prior_var}")
    _check_rank(E)

    M = E.shape[0]
    eta_b = model.eta_b
    ridge = (1.0 - eta_b) * noise_var / prior_var + eta_b * num_antennas
    system = (1.0 - eta_b) * (E @ E.conj().T) + ridge * np.eye(M)

    # U A = Y E^H with A Hermitian  <=>  A U^H = E Y^H
    try:
        solution = linalg.solve(system, E @ Y.conj().T, assume_a='her')
    except linalg.LinAlgError as e:
        raise SingularSystemError(f"ALMMSE system is singular: {e}")
    return solution.conj().T
