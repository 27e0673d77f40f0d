import numpy as np
import pytest

from modules.system_config import SystemConfig
from modules.utility_functions import clear_run_log


@pytest.fixture
def small_cfg():
    """Desk-scale scenario: N=16, M=8, tau=64, two paths per link"""
    return SystemConfig(num_antennas=16, num_elements=8, tau=64, num_paths_g=2, num_paths_h=2,
                        trials=3, seed=7, snr_db=10.0, bits=3)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture(autouse=True)
def empty_run_log():
    clear_run_log()
    yield
    clear_run_log()
