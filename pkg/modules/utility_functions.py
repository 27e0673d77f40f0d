#!/usr/bin/env python3

import math
import os
from datetime import datetime

import numpy as np

RUN_LOG_LIMIT = int(os.getenv('RISAMP_LOG_LIMIT', '100'))


class SimulationError(Exception):
    """Base class for every error raised by the simulator"""


class ConfigurationError(SimulationError, ValueError):
    """Inconsistent dimensions, out-of-range settings or unknown config keys"""


class InvalidRootError(ConfigurationError):
    """Zadoff-Chu root not coprime with the sequence length"""


class DomainError(SimulationError, ValueError):
    """Argument outside the mathematical domain of an operation"""


class DegeneratePowerError(SimulationError, ValueError):
    """Zero signal power where a normalisation needs a positive one"""


class SingularSystemError(SimulationError):
    """Linear system that cannot be solved (rank-deficient training)"""


class NumericalFailureError(SimulationError, RuntimeError):
    """Message-passing state left the finite positive range"""

    def __init__(self, message, iteration=None):
        super().__init__(message)
        self.iteration = iteration


def is_infinite_bits(bits):
    """True for the pass-through (infinite resolution) ADC setting"""
    return bits is None or (isinstance(bits, float) and math.isinf(bits))


def parse_bits(value):
    """Parse an ADC resolution from config/CLI text: 1..8 or inf"""
    if isinstance(value, str):
        text = value.strip().lower()
        if text in ('inf', 'infinite', 'infinity', '∞'):
            return math.inf
        value = float(text)
    if isinstance(value, float) and math.isinf(value):
        return math.inf
    if float(value) != int(value):
        raise ConfigurationError(f"bits must be an integer or inf, got {value!r}")
    return int(value)


def format_axis_value(value):
    """Stable text form of a sweep axis value (used in CSV output)"""
    if isinstance(value, float):
        if math.isinf(value):
            return 'inf'
        if value == int(value):
            return str(int(value))
        return repr(value)
    return str(value)


def to_db(value):
    """10*log10 of a linear NMSE; -inf for an exact estimate"""
    value = np.asarray(value, dtype=float)
    with np.errstate(divide='ignore'):
        return 10.0 * np.log10(value)


def complex_normal(rng, shape, variance=1.0):
    """Circularly-symmetric complex Gaussian samples CN(0, variance)"""
    scale = math.sqrt(variance / 2.0)
    return scale * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape))


# Global run log (audit trail for CLI and API executions)
run_log = []


def log_run(label, result, run_type='experiment'):
    """Log an experiment/sweep execution with timestamp and outcome"""
    global run_log

    log_entry = {
        'id': len(run_log) + 1,
        'timestamp': datetime.now().isoformat(),
        'label': label,
        'type': run_type,
        'success': result.get('success', False),
        'trials_ok': result.get('trials_ok', 0),
        'trials_diverged': result.get('trials_diverged', 0),
        'elapsed': result.get('elapsed', 0.0),
        'error': result.get('error', '')
    }

    run_log.append(log_entry)

    # Keep only the most recent entries
    if len(run_log) > RUN_LOG_LIMIT:
        run_log = run_log[-RUN_LOG_LIMIT:]

    return log_entry


def get_run_log():
    return list(run_log)


def clear_run_log():
    """Clear the run log, returning how many entries were dropped"""
    global run_log
    cleared = len(run_log)
    run_log = []
    return cleared
