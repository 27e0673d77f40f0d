#!/usr/bin/env python3

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import pandas as pd

from .utility_functions import ConfigurationError, InvalidRootError


@dataclass(frozen=True)
class TrainingMatrix:
    """Known M x tau matrix of RIS phase configurations times unit pilots"""
    E: np.ndarray
    root: int
    seq_len: int
    shift: int
    condition_number: float


def zadoff_chu(length, root):
    """Zadoff-Chu sequence of the given length and root (unit modulus, CAZAC)"""
    if length < 1:
        raise ConfigurationError(f"sequence length must be >= 1, got {length}")
    if math.gcd(root, length) != 1:
        raise InvalidRootError(f"root {root} is not coprime with length {length}")

    n = np.arange(length, dtype=np.float64)
    if length % 2:
        phase = np.pi * root * n * (n + 1) / length
    else:
        phase = np.pi * root * n * n / length
    return np.exp(-1j * phase)


@lru_cache(maxsize=32)
def build_training(num_elements, tau, root=1):
    """Rows are the base ZC sequence cyclically shifted by m * floor(tau / M)"""
    if tau < num_elements:
        raise ConfigurationError(
            f"training length tau={tau} must be >= number of RIS elements M={num_elements}")

    base = zadoff_chu(tau, root)
    shift = tau // num_elements
    E = np.stack([np.roll(base, m * shift) for m in range(num_elements)])
    E.setflags(write=False)

    singular_values = np.linalg.svd(E, compute_uv=False)
    condition_number = float(singular_values[0] / singular_values[-1]) \
        if singular_values[-1] > 0 else math.inf

    return TrainingMatrix(E=E, root=root, seq_len=tau, shift=shift,
                          condition_number=condition_number)


def export_training(training, path):
    """Write E as CSV (row, column, real, imag) for reproducibility audits"""
    rows, cols = np.indices(training.E.shape)
    frame = pd.DataFrame({
        'row': rows.ravel(),
        'column': cols.ravel(),
        'real': training.E.real.ravel(),
        'imag': training.E.imag.ravel(),
    })
    frame.to_csv(path, index=False, float_format='%.17g')
    print(f"💾 Training matrix {training.E.shape[0]}x{training.E.shape[1]} "
          f"(root {training.root}, cond {training.condition_number:.3g}) written to {path}")
    return path
