#!/usr/bin/env python3

import dataclasses
import json
import math
import os
from dataclasses import dataclass, field

from dotenv import dotenv_values

from .utility_functions import ConfigurationError, is_infinite_bits, parse_bits

# Operational settings from the environment
DEFAULT_WORKERS = int(os.getenv('RISAMP_WORKERS', '4'))
DEFAULT_OUT_DIR = os.getenv('RISAMP_OUT_DIR', 'results')

ESTIMATORS = ('bigamp', 'ls', 'almmse')
PRIOR_RULES = ('product', 'harmonic')
SNR_MODES = ('per_trial', 'ensemble')
MAX_FINITE_BITS = 8

# Short names used in the system model, accepted in config documents
KEY_ALIASES = {
    'n': 'num_antennas',
    'm': 'num_elements',
    'l': 'num_paths_g',
    'j': 'num_paths_h',
    'b': 'bits',
    'i_max': 'max_iter',
    'rho': 'damping',
    'epsilon': 'stop_tol',
    'root': 'zc_root',
}


@dataclass(frozen=True)
class SystemConfig:
    """Scenario dimensions, statistics and estimator options of one experiment"""
    num_antennas: int = 64          # N
    num_elements: int = 32          # M
    tau: int = 500
    num_paths_g: int = 10           # L
    num_paths_h: int = 10           # J
    bits: object = 3                # 1..8 or math.inf
    snr_db: float = 10.0
    sigma_g2: float = 1.0           # variance of each alpha_l
    sigma_h2: float = 1.0           # variance of each beta_j
    trials: int = 100
    seed: int = 0
    estimators: tuple = ESTIMATORS
    max_iter: int = 100
    damping: float = 0.7
    stop_tol: float = 1e-6
    zc_root: int = 1
    prior_rule: str = 'product'
    almmse_prior_rule: str = 'product'
    snr_mode: str = 'per_trial'
    max_restarts: int = 3
    trace: bool = field(default=False, compare=False)

    def replace(self, **changes):
        return dataclasses.replace(self, **changes)

    def to_dict(self):
        data = dataclasses.asdict(self)
        data['estimators'] = list(self.estimators)
        if is_infinite_bits(self.bits):
            data['bits'] = 'inf'
        return data


_FIELD_TYPES = {f.name: f.type for f in dataclasses.fields(SystemConfig)}


def _coerce(name, value):
    """Convert a raw config value (text or JSON scalar) to the field type"""
    try:
        if name == 'bits':
            return parse_bits(value)
        if name == 'estimators':
            if isinstance(value, str):
                value = [part.strip() for part in value.split(',') if part.strip()]
            return tuple(str(v).lower() for v in value)
        if name == 'trace':
            if isinstance(value, str):
                return value.strip().lower() in ('1', 'true', 'yes', 'on')
            return bool(value)
        field_type = _FIELD_TYPES[name]
        if field_type is int:
            if isinstance(value, float) and value != int(value):
                raise ValueError(f"expected an integer, got {value}")
            return int(value)
        if field_type is float:
            return float(value)
        return str(value).strip().lower()
    except (TypeError, ValueError) as e:
        raise ConfigurationError(f"Invalid value for '{name}': {value!r} ({e})")


def config_from_mapping(mapping, base=None):
    """Build a SystemConfig from a flat key-value mapping; unknown keys are errors"""
    base = base or SystemConfig()
    changes = {}
    for raw_key, value in mapping.items():
        key = raw_key.strip().lower().replace('-', '_')
        key = KEY_ALIASES.get(key, key)
        if key not in _FIELD_TYPES:
            raise ConfigurationError(f"Unknown configuration key '{raw_key}'")
        if value is None:
            continue
        changes[key] = _coerce(key, value)
    return base.replace(**changes)


def load_config(path, base=None):
    """Load a flat config document (.json object or KEY=value lines)"""
    if not os.path.exists(path):
        raise ConfigurationError(f"Config file not found: {path}")

    if path.endswith('.json'):
        with open(path) as handle:
            try:
                mapping = json.load(handle)
            except json.JSONDecodeError as e:
                raise ConfigurationError(f"Config file {path} is not valid JSON: {e}")
        if not isinstance(mapping, dict) or any(isinstance(v, dict) for v in mapping.values()):
            raise ConfigurationError(f"Config file {path} must be a flat key-value object")
    else:
        mapping = dotenv_values(path)

    print(f"📋 Loaded {len(mapping)} config keys from {path}")
    return config_from_mapping(mapping, base)


def validate_config(cfg):
    """Check the scenario invariants; raises ConfigurationError"""
    for name in ('num_antennas', 'num_elements', 'tau', 'num_paths_g', 'num_paths_h',
                 'trials', 'max_iter', 'zc_root'):
        if getattr(cfg, name) < 1:
            raise ConfigurationError(f"{name} must be >= 1, got {getattr(cfg, name)}")

    if cfg.tau < cfg.num_elements:
        raise ConfigurationError(
            f"training length tau={cfg.tau} must be >= number of RIS elements M={cfg.num_elements}")
    if 'bigamp' in cfg.estimators and cfg.num_antennas <= cfg.num_elements:
        raise ConfigurationError(
            f"BiG-AMP needs a tall cascaded channel (N > M), got N={cfg.num_antennas}, M={cfg.num_elements}")

    if not is_infinite_bits(cfg.bits):
        if not isinstance(cfg.bits, int) or not 1 <= cfg.bits <= MAX_FINITE_BITS:
            raise ConfigurationError(f"bits must be in 1..{MAX_FINITE_BITS} or inf, got {cfg.bits!r}")

    if not math.isfinite(cfg.snr_db):
        raise ConfigurationError("snr_db must be finite")
    if cfg.sigma_g2 <= 0 or cfg.sigma_h2 <= 0:
        raise ConfigurationError("path gain variances must be positive")
    if not 0 < cfg.damping <= 1:
        raise ConfigurationError(f"damping must be in (0, 1], got {cfg.damping}")
    if cfg.stop_tol < 0:
        raise ConfigurationError(f"stop_tol must be >= 0, got {cfg.stop_tol}")
    if cfg.max_restarts < 0:
        raise ConfigurationError("max_restarts must be >= 0")
    if cfg.seed < 0:
        raise ConfigurationError(f"seed must be a non-negative integer, got {cfg.seed}")

    if not cfg.estimators:
        raise ConfigurationError("at least one estimator must be selected")
    unknown = [name for name in cfg.estimators if name not in ESTIMATORS]
    if unknown:
        raise ConfigurationError(f"Unknown estimators {unknown}; choose from {list(ESTIMATORS)}")
    if cfg.prior_rule not in PRIOR_RULES:
        raise ConfigurationError(f"prior_rule must be one of {list(PRIOR_RULES)}")
    if cfg.almmse_prior_rule not in PRIOR_RULES:
        raise ConfigurationError(f"almmse_prior_rule must be one of {list(PRIOR_RULES)}")
    if cfg.snr_mode not in SNR_MODES:
        raise ConfigurationError(f"snr_mode must be one of {list(SNR_MODES)}")

    return cfg
