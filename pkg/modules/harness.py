#!/usr/bin/env python3

import math
import time
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass, field

import numpy as np
import pandas as pd

from .baselines import almmse_estimate, bussgang_model, ls_estimate
from .bigamp import amp_run, report_rows
from .channel_model import build_channels, prior_variance, sample_paths
from .quantizer import calibrate, optimal_stepsize, quantize
from .system_config import DEFAULT_WORKERS, validate_config
from .training import build_training
from .utility_functions import (ConfigurationError, DegeneratePowerError, NumericalFailureError,
                                SimulationError, complex_normal, format_axis_value,
                                is_infinite_bits, parse_bits)

SUMMARY_COLUMNS = ['axis_value', 'estimator', 'mean_nmse', 'median_nmse', 'stderr',
                   'trials_ok', 'trials_diverged']
SWEEP_AXES = ('snr_db', 'bits', 'tau', 'zc_root')

FIGURE_PROTOCOLS = {
    1: {'name': 'nmse_vs_snr', 'axis': 'snr_db', 'values': [-10.0, 0.0, 10.0, 20.0],
        'series_axis': 'bits', 'series': [1, 2, 3, 8, math.inf]},
    2: {'name': 'nmse_vs_bits', 'axis': 'bits', 'values': [1, 2, 3, 4, 5, 6, 7, 8],
        'series_axis': 'snr_db', 'series': [-10.0, 0.0, 10.0, 20.0]},
    3: {'name': 'nmse_vs_tau', 'axis': 'tau', 'values': [100, 200, 300, 400, 500],
        'series_axis': 'snr_db', 'series': [0.0], 'fixed': {'bits': 3}},
}


@dataclass
class TrialResult:
    trial_index: int
    seed: int
    nmse_per_estimator: dict
    amp_iterations: int = 0
    amp_restarts: int = 0
    diverged: bool = False
    failed_estimators: list = field(default_factory=list)
    op_count: int = 0
    trace: list = field(default_factory=list)


@dataclass
class ExperimentResult:
    config: object
    trials: list
    summary: list
    elapsed: float = 0.0

    def summary_frame(self):
        return pd.DataFrame(self.summary, columns=SUMMARY_COLUMNS)

    def trials_frame(self):
        rows = []
        for trial in self.trials:
            row = {'trial_index': trial.trial_index, 'seed': trial.seed}
            for estimator in self.config.estimators:
                row[f'nmse_{estimator}'] = trial.nmse_per_estimator.get(estimator, np.nan)
            row.update({'amp_iterations': trial.amp_iterations,
                        'amp_restarts': trial.amp_restarts,
                        'diverged': trial.diverged})
            rows.append(row)
        return pd.DataFrame(rows)


@dataclass
class SweepResult:
    axis: str
    values: list
    table: pd.DataFrame
    experiments: list


@dataclass
class FigureResult:
    figure_id: int
    name: str
    axis: str
    table: pd.DataFrame


def calibrate_noise(U, training, snr_db):
    """Noise variance giving the requested SNR on this realisation of Z = U E"""
    if not math.isfinite(snr_db):
        raise ConfigurationError(f"SNR must be finite, got {snr_db}")
    Z = U @ training.E
    energy = float(np.sum(np.abs(Z) ** 2))
    if energy <= 0.0:
        raise DegeneratePowerError("noiseless received signal has zero energy")
    return energy / (Z.size * 10.0 ** (snr_db / 10.0))


def ensemble_noise_var(cfg):
    """Noise variance from the ensemble signal power E||Z||^2 / (N tau) = M var_g var_h"""
    signal_power = (cfg.num_elements * cfg.num_paths_g * cfg.sigma_g2
                    * cfg.num_paths_h * cfg.sigma_h2)
    return signal_power / 10.0 ** (cfg.snr_db / 10.0)


def nmse(U_hat, U):
    """||U_hat - U||_F^2 / ||U||_F^2"""
    U_hat, U = np.asarray(U_hat), np.asarray(U)
    if U_hat.shape != U.shape:
        raise ConfigurationError(f"shape mismatch: estimate {U_hat.shape}, truth {U.shape}")
    energy = float(np.sum(np.abs(U) ** 2))
    if energy <= 0.0:
        raise DegeneratePowerError("NMSE is undefined for an all-zero channel")
    return float(np.sum(np.abs(U_hat - U) ** 2)) / energy


def _run_bigamp(observed, training, noise_var, cfg, truth):
    """BiG-AMP with adaptive restarts: halve the damping after each numerical failure"""
    damping = cfg.damping
    prior_var = prior_variance(cfg)
    for attempt in range(cfg.max_restarts + 1):
        try:
            report = amp_run(observed, training, noise_var, prior_var, max_iter=cfg.max_iter,
                             damping=damping, stop_tol=cfg.stop_tol,
                             truth=truth if cfg.trace else None)
            return report, attempt
        except NumericalFailureError as e:
            if attempt == cfg.max_restarts:
                raise
            print(f"🔄 BiG-AMP failed at iteration {e.iteration} (damping {damping:.3g}), "
                  f"retrying with damping {damping / 2:.3g}")
            damping /= 2.0


def run_trial(cfg, trial_index, training=None):
    """One Monte-Carlo trial: channel, training, noisy quantized observation, estimators"""
    if training is None:
        training = build_training(cfg.num_elements, cfg.tau, cfg.zc_root)

    # Separate streams so trial k sees the same paths at every sweep point
    path_rng = np.random.default_rng([cfg.seed, trial_index, 0])
    noise_rng = np.random.default_rng([cfg.seed, trial_index, 1])

    channel = build_channels(sample_paths(cfg, path_rng), cfg)
    U = channel.U
    Z = U @ training.E
    if cfg.snr_mode == 'ensemble':
        noise_var = ensemble_noise_var(cfg)
    else:
        noise_var = calibrate_noise(U, training, cfg.snr_db)
    Y = Z + complex_normal(noise_rng, Z.shape, noise_var)

    base_step = 0.0 if is_infinite_bits(cfg.bits) else optimal_stepsize(cfg.bits)
    spec = calibrate(cfg.bits, base_step, Y)
    observed = quantize(Y, spec)

    result = TrialResult(trial_index=trial_index, seed=cfg.seed, nmse_per_estimator={})
    for estimator in cfg.estimators:
        try:
            if estimator == 'ls':
                U_hat = ls_estimate(observed.values, training)
            elif estimator == 'almmse':
                model = bussgang_model(spec.eta_b, noise_var, float(np.mean(np.abs(Y) ** 2)))
                prior_var = prior_variance(cfg, cfg.almmse_prior_rule)
                U_hat = almmse_estimate(observed.values, training, model, noise_var, prior_var,
                                        cfg.num_antennas)
            else:
                report, restarts = _run_bigamp(observed, training, noise_var, cfg, U)
                U_hat = report.u_hat_final
                result.amp_iterations = report.iterations_run
                result.amp_restarts = restarts
                result.op_count = report.op_count
                if cfg.trace:
                    result.trace = report_rows(report)
            result.nmse_per_estimator[estimator] = nmse(U_hat, U)
        except SimulationError as e:
            print(f"❌ Trial {trial_index}: {estimator} failed: {e}")
            result.diverged = True
            result.failed_estimators.append(estimator)

    return result


def _run_trial_with_debug(cfg, trial_index, training):
    try:
        return run_trial(cfg, trial_index, training)
    except SimulationError as e:
        print(f"❌ Trial {trial_index} failed before estimation: {e}")
        return TrialResult(trial_index=trial_index, seed=cfg.seed, nmse_per_estimator={},
                           diverged=True, failed_estimators=list(cfg.estimators))


def summarize(trials, estimators, axis_value=''):
    """Aggregate rows (mean, median, standard error) per estimator over non-failed trials"""
    rows = []
    for estimator in estimators:
        values = np.array([t.nmse_per_estimator[estimator] for t in trials
                           if estimator in t.nmse_per_estimator])
        ok = len(values)
        rows.append({
            'axis_value': axis_value,
            'estimator': estimator,
            'mean_nmse': float(np.mean(values)) if ok else np.nan,
            'median_nmse': float(np.median(values)) if ok else np.nan,
            'stderr': float(np.std(values, ddof=1) / math.sqrt(ok)) if ok > 1 else 0.0,
            'trials_ok': ok,
            'trials_diverged': len(trials) - ok,
        })
    return rows


def run_experiment(cfg, workers=DEFAULT_WORKERS, axis_value='', log_progress=True):
    """Run cfg.trials independent trials on a worker pool; results sorted by trial index"""
    validate_config(cfg)
    training = build_training(cfg.num_elements, cfg.tau, cfg.zc_root)
    start_time = time.time()
    if log_progress:
        print(f"🚀 Starting {cfg.trials} trials (N={cfg.num_antennas}, M={cfg.num_elements}, "
              f"tau={cfg.tau}, bits={format_axis_value(cfg.bits)}, SNR={cfg.snr_db} dB) "
              f"with {workers} workers...")

    trials = []
    with ThreadPoolExecutor(max_workers=max(1, workers)) as executor:
        future_to_index = {executor.submit(_run_trial_with_debug, cfg, k, training): k
                           for k in range(cfg.trials)}

        completed = 0
        for future in as_completed(future_to_index):
            trials.append(future.result())
            completed += 1

            # Progress indicator every 10 trials
            if log_progress and (completed % 10 == 0 or completed == cfg.trials):
                elapsed = time.time() - start_time
                print(f"📊 Trial progress: {completed}/{cfg.trials} ({elapsed:.1f}s)")

    trials.sort(key=lambda trial: trial.trial_index)
    summary = summarize(trials, cfg.estimators, axis_value)
    elapsed = time.time() - start_time

    if log_progress:
        diverged = sum(1 for trial in trials if trial.diverged)
        medians = ', '.join(f"{row['estimator']}: {row['median_nmse']:.3e}" for row in summary)
        print(f"✅ {cfg.trials} trials completed in {elapsed:.2f}s "
              f"({diverged} diverged) - median NMSE {medians}")

    return ExperimentResult(config=cfg, trials=trials, summary=summary, elapsed=elapsed)


def coerce_axis_value(axis, value):
    if axis == 'bits':
        return parse_bits(value)
    if axis in ('tau', 'zc_root'):
        return int(value)
    return float(value)


def run_sweep(base, axis, values, workers=DEFAULT_WORKERS, log_progress=True):
    """One aggregate row per value and estimator; trial k shares its paths across values"""
    if axis not in SWEEP_AXES:
        raise ConfigurationError(f"Unknown sweep axis '{axis}'; choose from {list(SWEEP_AXES)}")
    if not values:
        raise ConfigurationError("sweep needs at least one axis value")

    configs = []
    for value in values:
        try:
            value = coerce_axis_value(axis, value)
        except ValueError as e:
            raise ConfigurationError(f"Invalid {axis} value {value!r}: {e}")
        configs.append((value, validate_config(base.replace(**{axis: value}))))

    start_time = time.time()
    if log_progress:
        print(f"🚀 Sweeping {axis} over {[format_axis_value(v) for v, _ in configs]}")

    experiments = []
    rows = []
    for value, cfg in configs:
        experiment = run_experiment(cfg, workers=workers, axis_value=format_axis_value(value),
                                    log_progress=log_progress)
        experiments.append(experiment)
        rows.extend(experiment.summary)

    if log_progress:
        print(f"🏁 Sweep over {axis} completed in {time.time() - start_time:.2f}s")

    return SweepResult(axis=axis, values=[v for v, _ in configs],
                       table=pd.DataFrame(rows, columns=SUMMARY_COLUMNS),
                       experiments=experiments)


def run_figure(figure_id, base, workers=DEFAULT_WORKERS, log_progress=True):
    """Reproduce one of the three published NMSE figures as a series of sweeps"""
    if figure_id not in FIGURE_PROTOCOLS:
        raise ConfigurationError(f"Unknown figure {figure_id}; choose from {sorted(FIGURE_PROTOCOLS)}")
    protocol = FIGURE_PROTOCOLS[figure_id]
    base = base.replace(**protocol.get('fixed', {}))

    frames = []
    for series_value in protocol['series']:
        if log_progress:
            print(f"📈 Figure {figure_id}: series {protocol['series_axis']}={format_axis_value(series_value)}")
        sweep = run_sweep(base.replace(**{protocol['series_axis']: series_value}),
                          protocol['axis'], protocol['values'], workers=workers,
                          log_progress=log_progress)
        frame = sweep.table.copy()
        frame.insert(0, 'series', f"{protocol['series_axis']}={format_axis_value(series_value)}")
        frames.append(frame)

    return FigureResult(figure_id=figure_id, name=protocol['name'], axis=protocol['axis'],
                        table=pd.concat(frames, ignore_index=True))
