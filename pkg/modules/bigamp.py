#!/usr/bin/env python3
"""
Bilinear GAMP with a known training matrix.

With E known its message variances are zero, so the iteration reduces to the
plug-in forms: p = U E with the Onsager correction, posterior moments of z
through the quantizer likelihood, and Gaussian shrinkage of the pseudo
observations q of U.
"""

from dataclasses import dataclass, field

import numpy as np

from .denoisers import gaussian_prior_denoiser, quantized_posterior_parts, unquantized_posterior_parts
from .quantizer import bin_limits
from .utility_functions import ConfigurationError, NumericalFailureError

VAR_MIN = 1e-12
VAR_MAX = 1e12
DEFAULT_MAX_ITER = 100
DEFAULT_DAMPING = 0.7
DEFAULT_STOP_TOL = 1e-6


@dataclass(frozen=True)
class AmpState:
    u_hat: np.ndarray       # N x M
    u_var: np.ndarray
    p_hat: np.ndarray       # N x tau
    p_var: np.ndarray
    z_hat: np.ndarray
    z_var: np.ndarray
    s_hat: np.ndarray
    s_var: np.ndarray
    q_hat: np.ndarray       # N x M
    q_var: np.ndarray
    iteration: int = 1
    mac_count: int = 0
    elementwise_ops: int = 0
    clamp_count: int = 0


@dataclass
class AmpReport:
    u_hat_final: np.ndarray
    iterations_run: int
    per_iteration_residual: list
    op_count: int
    elementwise_ops: int = 0
    clamp_count: int = 0
    damping: float = DEFAULT_DAMPING
    nmse_trace: list = field(default_factory=list)


def amp_init(num_antennas, num_elements, tau):
    """Initial state: s = 0, z = 0, var_z = 1, u = 0, var_u = 1"""
    if min(num_antennas, num_elements, tau) < 1:
        raise ConfigurationError(f"dimensions must be positive, got {(num_antennas, num_elements, tau)}")

    block_u = (num_antennas, num_elements)
    block_z = (num_antennas, tau)
    return AmpState(
        u_hat=np.zeros(block_u, dtype=complex),
        u_var=np.ones(block_u),
        p_hat=np.zeros(block_z, dtype=complex),
        p_var=np.ones(block_z),
        z_hat=np.zeros(block_z, dtype=complex),
        z_var=np.ones(block_z),
        s_hat=np.zeros(block_z, dtype=complex),
        s_var=np.zeros(block_z),
        q_hat=np.zeros(block_u, dtype=complex),
        q_var=np.ones(block_u),
    )


def _guard(values, name, iteration):
    """Clamp a variance field into [VAR_MIN, VAR_MAX]; NaN or negative entries are failures"""
    if np.any(np.isnan(values)) or np.any(values < 0):
        raise NumericalFailureError(f"invalid {name} at iteration {iteration}", iteration=iteration)
    return np.clip(values, VAR_MIN, VAR_MAX)


def _output_moments(p_hat, p_var, observed, noise_var):
    """Steps 5-6: posterior of z = Re + j Im given the ADC output"""
    part_var = 0.5 * p_var
    if observed.spec.infinite:
        mean_re, var_re = unquantized_posterior_parts(p_hat.real, part_var, observed.values.real, noise_var)
        mean_im, var_im = unquantized_posterior_parts(p_hat.imag, part_var, observed.values.imag, noise_var)
    else:
        spec = observed.spec
        lower_re, upper_re = bin_limits(observed.bin_index_re, spec.scale_re, spec.bits)
        lower_im, upper_im = bin_limits(observed.bin_index_im, spec.scale_im, spec.bits)
        mean_re, var_re = quantized_posterior_parts(p_hat.real, part_var, lower_re, upper_re, noise_var)
        mean_im, var_im = quantized_posterior_parts(p_hat.imag, part_var, lower_im, upper_im, noise_var)
    return mean_re + 1j * mean_im, var_re + var_im


def amp_iterate(state, observed, training, noise_var, prior_var, damping=DEFAULT_DAMPING):
    """One pass of the iteration; returns the next state"""
    E = training.E
    N, M = state.u_hat.shape
    tau = state.p_hat.shape[1]
    if observed.values.shape != (N, tau) or E.shape != (M, tau):
        raise ConfigurationError(
            f"shape mismatch: state {N}x{M}/{N}x{tau}, Y {observed.values.shape}, E {E.shape}")

    i = state.iteration
    E_abs2 = np.abs(E) ** 2

    # Steps 3-4: plug-in estimate of Z = U E with Onsager correction
    p_var = _guard(state.u_var @ E_abs2, 'nu_p', i)
    p_hat = state.u_hat @ E - state.s_hat * p_var

    # Steps 5-6
    z_hat, z_var = _output_moments(p_hat, p_var, observed, noise_var)
    z_var = np.clip(z_var, VAR_MIN, VAR_MAX)

    # Steps 7-8: scaled residual and inverse-residual variance
    s_var = (1.0 - z_var / p_var) / p_var
    negative = s_var < 0
    clamp_count = state.clamp_count + int(np.count_nonzero(negative))
    s_var = np.where(negative, 0.0, s_var)
    s_hat = (z_hat - p_hat) / p_var
    if i > 1:
        s_hat = damping * s_hat + (1.0 - damping) * state.s_hat
        s_var = damping * s_var + (1.0 - damping) * state.s_var

    # Steps 9-10: pseudo observations of U
    with np.errstate(divide='ignore'):
        q_var = _guard(1.0 / (s_var @ E_abs2.T), 'nu_q', i)
    q_hat = state.u_hat + q_var * (s_hat @ E.conj().T)

    # Steps 11-12
    u_hat, u_var = gaussian_prior_denoiser(q_hat, q_var, prior_var)
    u_hat = damping * u_hat + (1.0 - damping) * state.u_hat
    u_var = _guard(damping * u_var + (1.0 - damping) * state.u_var, 'nu_u', i)

    if not np.all(np.isfinite(u_hat)):
        raise NumericalFailureError(f"non-finite channel estimate at iteration {i}", iteration=i)

    return AmpState(
        u_hat=u_hat, u_var=u_var, p_hat=p_hat, p_var=p_var, z_hat=z_hat, z_var=z_var,
        s_hat=s_hat, s_var=s_var, q_hat=q_hat, q_var=q_var,
        iteration=i + 1,
        # Four N x M x tau products: steps 3, 4, 9 and 10
        mac_count=state.mac_count + 4 * N * M * tau,
        elementwise_ops=state.elementwise_ops + N * tau + N * M,
        clamp_count=clamp_count,
    )


def _relative_change(new, old):
    old_norm = np.linalg.norm(old)
    if old_norm == 0.0:
        # Leaving the all-zero start counts as a full relative change
        return 1.0 if np.linalg.norm(new) > 0.0 else 0.0
    return float(np.linalg.norm(new - old) / old_norm)


def amp_run(observed, training, noise_var, prior_var, max_iter=DEFAULT_MAX_ITER,
            damping=DEFAULT_DAMPING, stop_tol=DEFAULT_STOP_TOL, truth=None):
    """Iterate until max_iter or relative change of U below stop_tol"""
    if max_iter < 1:
        raise ConfigurationError(f"max_iter must be >= 1, got {max_iter}")
    if not 0 < damping <= 1:
        raise ConfigurationError(f"damping must be in (0, 1], got {damping}")
    if stop_tol < 0:
        raise ConfigurationError(f"stop_tol must be >= 0, got {stop_tol}")

    N, tau = observed.values.shape
    M = training.E.shape[0]
    state = amp_init(N, M, tau)
    truth_energy = float(np.sum(np.abs(truth) ** 2)) if truth is not None else None

    residuals = []
    nmse_trace = []
    for _ in range(max_iter):
        previous = state.u_hat
        state = amp_iterate(state, observed, training, noise_var, prior_var, damping)
        residuals.append(_relative_change(state.u_hat, previous))
        if truth is not None:
            nmse_trace.append(float(np.sum(np.abs(state.u_hat - truth) ** 2)) / truth_energy)
        if residuals[-1] < stop_tol:
            break

    return AmpReport(
        u_hat_final=state.u_hat,
        iterations_run=len(residuals),
        per_iteration_residual=residuals,
        op_count=state.mac_count,
        elementwise_ops=state.elementwise_ops,
        clamp_count=state.clamp_count,
        damping=damping,
        nmse_trace=nmse_trace,
    )


def report_rows(report):
    """Per-iteration (iteration, residual, nmse) rows for trace export"""
    rows = []
    for index, residual in enumerate(report.per_iteration_residual, start=1):
        row = {'iteration': index, 'residual': residual}
        row['nmse'] = report.nmse_trace[index - 1] if report.nmse_trace else np.nan
        rows.append(row)
    return rows
