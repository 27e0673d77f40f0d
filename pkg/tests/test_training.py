import numpy as np
import pandas as pd
import pytest

from modules.training import build_training, export_training, zadoff_chu
from modules.utility_functions import ConfigurationError, InvalidRootError


def test_zadoff_chu_length_three():
    expected = [1.0, np.exp(-2j * np.pi / 3), 1.0]
    np.testing.assert_allclose(zadoff_chu(3, 1), expected, atol=1e-12)


@pytest.mark.parametrize('length, root', [(63, 1), (64, 3), (500, 7)])
def test_zadoff_chu_is_cazac(length, root):
    seq = zadoff_chu(length, root)
    assert np.allclose(np.abs(seq), 1.0)
    # Zero cyclic autocorrelation at every non-zero lag
    for lag in (1, 2, length // 3):
        assert abs(np.vdot(seq, np.roll(seq, lag))) < 1e-8 * length


def test_zadoff_chu_rejects_non_coprime_root():
    with pytest.raises(InvalidRootError):
        zadoff_chu(10, 2)


def test_invalid_root_is_a_configuration_error():
    assert issubclass(InvalidRootError, ConfigurationError)


@pytest.mark.parametrize('num_elements, tau', [(8, 64), (32, 500), (4, 4)])
def test_training_rows_are_orthogonal(num_elements, tau):
    training = build_training(num_elements, tau)
    E = training.E
    assert E.shape == (num_elements, tau)
    np.testing.assert_allclose(E @ E.conj().T, tau * np.eye(num_elements), atol=1e-8 * tau)
    assert training.condition_number == pytest.approx(1.0, abs=1e-8)
    assert np.allclose(np.abs(E), 1.0)


def test_training_rows_are_cyclic_shifts():
    training = build_training(4, 12)
    assert training.shift == 3
    np.testing.assert_allclose(training.E[2], np.roll(training.E[0], 6))


def test_training_needs_tau_at_least_m():
    with pytest.raises(ConfigurationError):
        build_training(32, 16)


def test_training_matrix_is_read_only():
    training = build_training(8, 64)
    with pytest.raises(ValueError):
        training.E[0, 0] = 0.0


def test_export_training_round_trip(tmp_path):
    training = build_training(4, 16, 3)
    path = export_training(training, tmp_path / 'training.csv')
    frame = pd.read_csv(path)
    assert list(frame.columns) == ['row', 'column', 'real', 'imag']
    assert len(frame) == 4 * 16
    E = np.zeros((4, 16), dtype=complex)
    E[frame['row'], frame['column']] = frame['real'] + 1j * frame['imag']
    np.testing.assert_allclose(E, training.E, atol=1e-15)
